#pragma once

/// @file scenario.hpp
/// Scenario configuration and run dispatch for the command-line front end.

namespace gwd {}
