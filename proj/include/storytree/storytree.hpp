#pragma once

#include "storytree/crossmin.hpp"
#include "storytree/error.hpp"
#include "storytree/ingest.hpp"
#include "storytree/layout.hpp"
#include "storytree/metrics.hpp"
#include "storytree/model.hpp"
#include "storytree/pipeline.hpp"
#include "storytree/render.hpp"
#include "storytree/report.hpp"
