#pragma once

#include "duplex.hpp"
#include "engine.hpp"
#include "message.hpp"
#include "protocols/registry.hpp"
#include "protocols/schedule.hpp"
#include "random.hpp"
#include "rumor_set.hpp"
#include "scaling.hpp"
#include "selectors.hpp"
#include "tree.hpp"
#include "trees.hpp"
#include "verify.hpp"
