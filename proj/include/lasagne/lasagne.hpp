#pragma once

#include "lasagne/entity_linking.hpp"
#include "lasagne/errors.hpp"
#include "lasagne/execute.hpp"
#include "lasagne/gat.hpp"
#include "lasagne/generator.hpp"
#include "lasagne/kg.hpp"
#include "lasagne/logical_form.hpp"
#include "lasagne/losses.hpp"
#include "lasagne/metrics.hpp"
#include "lasagne/pipeline.hpp"
#include "lasagne/question_type.hpp"
#include "lasagne/templates.hpp"
#include "lasagne/tp_graph.hpp"
