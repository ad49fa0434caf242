#pragma once

#include "cirdil/chunking.hpp"
#include "cirdil/corpus.hpp"
#include "cirdil/corpus_gen.hpp"
#include "cirdil/corpus_io.hpp"
#include "cirdil/dumps.hpp"
#include "cirdil/embedding.hpp"
#include "cirdil/errors.hpp"
#include "cirdil/evaluation.hpp"
#include "cirdil/injection.hpp"
#include "cirdil/io.hpp"
#include "cirdil/retrieval.hpp"
#include "cirdil/rng.hpp"
#include "cirdil/run_config.hpp"
#include "cirdil/tokenize.hpp"
