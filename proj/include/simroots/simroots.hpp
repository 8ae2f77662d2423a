#pragma once

#include <simroots/analysis.hpp>
#include <simroots/basis.hpp>
#include <simroots/confluent.hpp>
#include <simroots/error.hpp>
#include <simroots/expression.hpp>
#include <simroots/genpoly.hpp>
#include <simroots/jet.hpp>
#include <simroots/problem.hpp>
#include <simroots/scalar.hpp>
#include <simroots/solver.hpp>
