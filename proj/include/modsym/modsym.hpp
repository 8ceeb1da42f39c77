#pragma once

// Umbrella header.

#include "modsym/bigint.hpp"
#include "modsym/cli.hpp"
#include "modsym/cusps.hpp"
#include "modsym/errors.hpp"
#include "modsym/geometry.hpp"
#include "modsym/group_element.hpp"
#include "modsym/growth.hpp"
#include "modsym/horoball_search.hpp"
#include "modsym/reduction.hpp"
#include "modsym/rng.hpp"
#include "modsym/symbols.hpp"
#include "modsym/table_cache.hpp"
#include "modsym/words.hpp"
