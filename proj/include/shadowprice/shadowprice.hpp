#ifndef SHADOWPRICE_SHADOWPRICE_HPP
#define SHADOWPRICE_SHADOWPRICE_HPP

#include "shadowprice/nlp_core.hpp"
#include "shadowprice/orchard_model.hpp"
#include "shadowprice/solver.hpp"
#include "shadowprice/sensitivity.hpp"
#include "shadowprice/audit.hpp"
#include "shadowprice/report.hpp"

#endif // SHADOWPRICE_SHADOWPRICE_HPP
