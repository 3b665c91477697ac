#include <catch2/catch_amalgamated.hpp>
#include "aif/checkpoint.hpp"
