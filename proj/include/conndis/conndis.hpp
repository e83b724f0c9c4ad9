// Umbrella header.
#pragma once

#include "conndis/classifier.hpp"
#include "conndis/corpus.hpp"
#include "conndis/errors.hpp"
#include "conndis/evaluation.hpp"
#include "conndis/features.hpp"
#include "conndis/lexicon.hpp"
#include "conndis/manifest.hpp"
#include "conndis/report.hpp"
#include "conndis/text.hpp"
#include "conndis/treebank.hpp"
