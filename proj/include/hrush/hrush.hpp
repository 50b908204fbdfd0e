#pragma once

#include "hrush/classes.hpp"
#include "hrush/dynamics.hpp"
#include "hrush/encoding.hpp"
#include "hrush/errors.hpp"
#include "hrush/gadgets.hpp"
#include "hrush/generic_builder.hpp"
#include "hrush/graph.hpp"
#include "hrush/growth.hpp"
#include "hrush/orientability.hpp"
#include "hrush/predimension.hpp"
