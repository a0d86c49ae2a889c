#pragma once

#include "ctqec/linalg.hpp"
#include "ctqec/pauli.hpp"
#include "ctqec/stabilizer.hpp"
#include "ctqec/channels.hpp"
#include "ctqec/diamond_norm.hpp"
#include "ctqec/protocol_minimal.hpp"
#include "ctqec/baselines.hpp"
#include "ctqec/dynamics.hpp"
