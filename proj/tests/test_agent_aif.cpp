#include <catch2/catch_amalgamated.hpp>
#include "aif/agent_aif.hpp"
