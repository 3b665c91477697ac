#include <catch2/catch_amalgamated.hpp>
#include "aif/agent_qlearning.hpp"
#include "aif/agent_actor_critic.hpp"
