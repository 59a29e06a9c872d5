#pragma once

#include "sgsum/autodiff.hpp"
#include "sgsum/checkpoint.hpp"
#include "sgsum/config.hpp"
#include "sgsum/corpus.hpp"
#include "sgsum/dataset.hpp"
#include "sgsum/encoder.hpp"
#include "sgsum/error.hpp"
#include "sgsum/graph.hpp"
#include "sgsum/model.hpp"
#include "sgsum/optim.hpp"
#include "sgsum/params.hpp"
#include "sgsum/ranking.hpp"
#include "sgsum/rng.hpp"
#include "sgsum/rouge.hpp"
#include "sgsum/tensor.hpp"
#include "sgsum/text.hpp"
#include "sgsum/tfidf.hpp"
#include "sgsum/trainer.hpp"
