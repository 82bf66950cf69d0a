#pragma once

#include "souvlaki/certificate.hpp"
#include "souvlaki/dyadic.hpp"
#include "souvlaki/electrical.hpp"
#include "souvlaki/error.hpp"
#include "souvlaki/gadget.hpp"
#include "souvlaki/geometry.hpp"
#include "souvlaki/graph.hpp"
#include "souvlaki/graph_algorithms.hpp"
#include "souvlaki/graph_json.hpp"
#include "souvlaki/hyperbolic.hpp"
#include "souvlaki/label.hpp"
#include "souvlaki/laplacian.hpp"
#include "souvlaki/minor.hpp"
#include "souvlaki/parallel.hpp"
#include "souvlaki/philox.hpp"
#include "souvlaki/s_bound.hpp"
#include "souvlaki/structure.hpp"
#include "souvlaki/walks.hpp"
