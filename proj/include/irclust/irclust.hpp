#pragma once

#include "irclust/dense_matrix.hpp"
#include "irclust/eigen_dense.hpp"
#include "irclust/eigs.hpp"
#include "irclust/experiments.hpp"
#include "irclust/gmm.hpp"
#include "irclust/init.hpp"
#include "irclust/io.hpp"
#include "irclust/kmeans.hpp"
#include "irclust/metrics.hpp"
#include "irclust/models.hpp"
#include "irclust/partition.hpp"
#include "irclust/refine.hpp"
#include "irclust/rng.hpp"
#include "irclust/sparse_symmetric.hpp"
