// scenario parsing and dispatch; see scenario.hpp
#include "gwd/scenario.hpp"
