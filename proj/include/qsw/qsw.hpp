// qsw.hpp — Umbrella header

#pragma once

#include "qsw/closed_form.hpp"
#include "qsw/dynamics.hpp"
#include "qsw/est.hpp"
#include "qsw/liouvillian.hpp"
#include "qsw/network.hpp"
#include "qsw/spec_file.hpp"
#include "qsw/sweep.hpp"
