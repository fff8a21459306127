#pragma once

#include "specrob/corruptions.hpp"
#include "specrob/error.hpp"
#include "specrob/fft.hpp"
#include "specrob/io/csv.hpp"
#include "specrob/io/plot.hpp"
#include "specrob/io/tensor_file.hpp"
#include "specrob/jacobian.hpp"
#include "specrob/path_metrics.hpp"
#include "specrob/paths.hpp"
#include "specrob/robustness.hpp"
#include "specrob/rng.hpp"
#include "specrob/shift_psd.hpp"
#include "specrob/spectral.hpp"
#include "specrob/synthetic.hpp"
#include "specrob/tensor.hpp"
