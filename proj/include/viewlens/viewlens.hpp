#pragma once

// Umbrella header.

#include "viewlens/chase.hpp"
#include "viewlens/complement.hpp"
#include "viewlens/core.hpp"
#include "viewlens/dependencies.hpp"
#include "viewlens/determinacy.hpp"
#include "viewlens/frontend/lexer.hpp"
#include "viewlens/frontend/parser.hpp"
#include "viewlens/frontend/printer.hpp"
#include "viewlens/generate.hpp"
#include "viewlens/implication.hpp"
#include "viewlens/models.hpp"
#include "viewlens/updates.hpp"
