#pragma once

#include "rfl/canonical.hpp"
#include "rfl/corpus.hpp"
#include "rfl/error.hpp"
#include "rfl/isomorphism.hpp"
#include "rfl/metrics.hpp"
#include "rfl/mgf.hpp"
#include "rfl/molgraph.hpp"
#include "rfl/parallel.hpp"
#include "rfl/rflcore.hpp"
#include "rfl/rfltext.hpp"
#include "rfl/ringsys.hpp"
#include "rfl/smiles.hpp"
#include "rfl/vocabulary.hpp"
