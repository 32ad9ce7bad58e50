#pragma once

#include "sofic/core.hpp"
#include "sofic/presentation.hpp"
#include "sofic/automaton.hpp"
#include "sofic/language.hpp"
#include "sofic/periodic.hpp"
#include "sofic/fischer.hpp"
#include "sofic/invariants.hpp"
#include "sofic/marker.hpp"
#include "sofic/orbit.hpp"
#include "sofic/codec.hpp"
#include "sofic/embedding.hpp"
