#pragma once

#include "cohlab/error.hpp"
#include "cohlab/linalg.hpp"
#include "cohlab/random.hpp"
#include "cohlab/parallel.hpp"
#include "cohlab/density.hpp"
#include "cohlab/coherence.hpp"
#include "cohlab/channels.hpp"
#include "cohlab/polygamy.hpp"
#include "cohlab/optimize.hpp"
#include "cohlab/discord.hpp"
#include "cohlab/metrology.hpp"
#include "cohlab/measurement.hpp"
#include "cohlab/io.hpp"
