#pragma once

#include "qhmm/alphabet.hpp"
#include "qhmm/compress.hpp"
#include "qhmm/errors.hpp"
#include "qhmm/io.hpp"
#include "qhmm/linalg.hpp"
#include "qhmm/model.hpp"
#include "qhmm/process.hpp"
#include "qhmm/spectral.hpp"
#include "qhmm/tolerance.hpp"
#include "qhmm/transfer.hpp"
