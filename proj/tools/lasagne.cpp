// Command-line surface for the engine: execute logical forms, link tagged
// utterances, dump the type-predicate graph, run GAT diagnostics, generate
// synthetic datasets, and score prediction files.
//
// Exit codes: 0 success, 1 validation/usage error, 2 I/O error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <lasagne/lasagne.hpp>

namespace {

lasagne::KnowledgeGraph load_kg_dir(const std::string& dir) {
  return lasagne::KnowledgeGraph::load(dir + "/triples.tsv", dir + "/labels.tsv",
                                       dir + "/types.tsv");
}

bool is_comment(std::string_view line) {
  std::size_t i = line.find_first_not_of(" \t");
  return i != std::string_view::npos && line[i] == '#';
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f%%", 100.0 * fraction);
  return buf;
}

int run_exec(const std::string& kg_dir, const std::string& lf_text, const std::string& batch) {
  if (lf_text.empty() == batch.empty()) {
    std::cerr << "exec needs exactly one of --lf or --batch\n";
    return 1;
  }
  const lasagne::KnowledgeGraph kg = load_kg_dir(kg_dir);

  std::vector<std::string> lf_texts;
  if (!lf_text.empty()) lf_texts.push_back(lf_text);
  if (!batch.empty())
    lasagne::detail::for_each_line(batch, [&](std::size_t, std::string_view line) {
      if (!is_comment(line)) lf_texts.emplace_back(line);
    });

  for (const std::string& text : lf_texts) {
    lasagne::LFNode node = lasagne::parse_lf(text);
    lasagne::typecheck(node);
    std::cout << lasagne::to_string(lasagne::execute(node, kg)) << '\n';
  }
  return 0;
}

int run_link(const std::string& kg_dir, const std::string& utterance_path,
             const std::string& gold_path) {
  const lasagne::KnowledgeGraph kg = load_kg_dir(kg_dir);
  const lasagne::InvertedIndex index = lasagne::InvertedIndex::build(kg);
  const std::vector<lasagne::TagSequence> utterances =
      lasagne::load_tagged_utterances(utterance_path);

  std::vector<std::string> outputs;
  outputs.reserve(utterances.size());
  for (const lasagne::TagSequence& tagged : utterances) {
    std::string row;
    for (const lasagne::Span& span : lasagne::extract_spans(tagged)) {
      const lasagne::LinkedEntity linked = lasagne::link_span(span, tagged.tokens, index, kg);
      if (!row.empty()) row += ' ';
      row += linked.entity;
    }
    outputs.push_back(std::move(row));
    std::cout << outputs.back() << '\n';
  }

  if (!gold_path.empty()) {
    std::vector<std::string> gold;
    lasagne::detail::for_each_line(gold_path, [&](std::size_t, std::string_view line) {
      if (!is_comment(line)) gold.push_back(lasagne::detail::join(lasagne::detail::split_ws(line), " "));
    });
    if (gold.size() != outputs.size()) {
      std::cerr << "gold has " << gold.size() << " rows, corpus has " << outputs.size() << '\n';
      return 1;
    }
    std::size_t hits = 0;
    for (std::size_t i = 0; i < gold.size(); ++i) hits += gold[i] == outputs[i];
    std::cout << "accuracy: " << hits << '/' << gold.size() << " ("
              << format_percent(gold.empty() ? 1.0 : double(hits) / double(gold.size())) << ")\n";
    if (hits != gold.size()) return 1;
  }
  return 0;
}

int run_graph(const std::string& kg_dir, const std::string& out_path) {
  const lasagne::KnowledgeGraph kg = load_kg_dir(kg_dir);
  const lasagne::TypePredicateGraph graph = lasagne::build_tp_graph(kg);
  if (out_path.empty()) {
    std::cout << lasagne::dump_graph(graph);
  } else {
    lasagne::save_graph(graph, out_path);
    std::cout << "nodes " << graph.nodes.size() << " (types " << graph.type_count
              << ", predicates " << graph.nodes.size() - graph.type_count << "), edges "
              << graph.edge_count() << '\n';
  }
  return 0;
}

int run_gat(const std::string& graph_path, const std::string& emb_path, std::uint64_t seed,
            std::size_t heads, Eigen::Index d_in, Eigen::Index d_out) {
  const lasagne::TypePredicateGraph graph = lasagne::load_graph(graph_path);
  lasagne::NodeEmbeddings h;
  if (!emb_path.empty()) {
    h = lasagne::load_embeddings(emb_path, graph);
    d_in = h.cols();
  } else {
    h = lasagne::seeded_embeddings(graph, seed, d_in);
  }
  const lasagne::GATParams params = lasagne::seeded_gat_params(seed + 1, heads, d_in, d_out);
  const lasagne::GatLayerResult result = lasagne::gat_forward_detailed(graph, h, params);

  double worst_row_sum = 0.0;
  for (const Eigen::MatrixXd& att : result.attention) {
    Eigen::VectorXd sums = att.rowwise().sum();
    worst_row_sum = std::max(worst_row_sum, (sums.array() - 1.0).abs().maxCoeff());
  }

  std::cout << "nodes " << graph.nodes.size() << " heads " << heads << " d_in " << d_in
            << " d_out " << d_out << '\n';
  char line[128];
  std::snprintf(line, sizeof(line), "max attention row-sum deviation: %.3e", worst_row_sum);
  std::cout << line << '\n';
  std::snprintf(line, sizeof(line), "output frobenius norm: %.12g", result.output.norm());
  std::cout << line << '\n';
  std::snprintf(line, sizeof(line), "output sum: %.12g", result.output.sum());
  std::cout << line << '\n';
  return 0;
}

int run_gen(const std::string& kg_dir, const std::string& templates_path, std::size_t count,
            std::uint64_t seed, const std::string& out_dir) {
  const lasagne::KnowledgeGraph kg = load_kg_dir(kg_dir);
  const std::vector<lasagne::QuestionTemplate> templates = lasagne::load_templates(templates_path);
  const std::vector<lasagne::DatasetExample> examples =
      lasagne::generate_dataset(kg, templates, count, seed);

  std::filesystem::create_directories(out_dir);
  lasagne::write_dataset(out_dir + "/dataset.tsv", examples);
  lasagne::save_eval_records(out_dir + "/gold.tsv", lasagne::to_eval_records(examples));
  lasagne::save_eval_records(out_dir + "/pred.tsv", lasagne::pipeline_predictions(kg, examples));
  std::cout << "wrote " << examples.size() << " examples to " << out_dir << '\n';
  return 0;
}

int run_eval(const std::string& pred_path, const std::string& gold_path) {
  const std::vector<lasagne::EvalRecord> pred = lasagne::load_eval_records(pred_path);
  const std::vector<lasagne::EvalRecord> gold = lasagne::load_eval_records(gold_path);
  std::cout << lasagne::format_report(lasagne::aggregate(pred, gold));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"knowledge-graph logical form engine"};
  app.require_subcommand(1);

  std::string kg_dir, lf_text, batch_path;
  CLI::App* exec = app.add_subcommand("exec", "parse, typecheck, and execute logical forms");
  exec->add_option("--kg", kg_dir, "directory with triples.tsv/labels.tsv/types.tsv")->required();
  exec->add_option("--lf", lf_text, "one logical form");
  exec->add_option("--batch", batch_path, "file with one logical form per line");

  std::string utterance_path, link_gold_path;
  CLI::App* link = app.add_subcommand("link", "link tagged utterances to entity ids");
  link->add_option("--kg", kg_dir, "knowledge-graph directory")->required();
  link->add_option("--utterance", utterance_path, "token|edtag|slot utterances, one per line")
      ->required();
  link->add_option("--gold", link_gold_path, "expected entity ids per line; prints accuracy");

  std::string graph_out;
  CLI::App* graph = app.add_subcommand("graph", "dump the type-predicate graph");
  graph->add_option("--kg", kg_dir, "knowledge-graph directory")->required();
  graph->add_option("--out", graph_out, "output path (stdout when omitted)");

  std::string graph_path, emb_path;
  std::uint64_t gat_seed = 0;
  std::size_t gat_heads = 2;
  Eigen::Index gat_din = 3072, gat_dout = 300;
  CLI::App* gat = app.add_subcommand("gat", "run a GAT forward pass and print diagnostics");
  gat->add_option("--graph", graph_path, "graph file produced by `graph --out`")->required();
  gat->add_option("--emb", emb_path, "node embeddings file (seeded when omitted)");
  gat->add_option("--seed", gat_seed, "seed for embeddings and parameters");
  gat->add_option("--heads", gat_heads, "attention heads")->check(CLI::PositiveNumber);
  gat->add_option("--din", gat_din, "input width for seeded embeddings")
      ->check(CLI::PositiveNumber);
  gat->add_option("--dout", gat_dout, "per-head output width")->check(CLI::PositiveNumber);

  std::string templates_path, gen_out;
  std::size_t gen_count = 50;
  std::uint64_t gen_seed = 7;
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  gen->add_option("--kg", kg_dir, "knowledge-graph directory")->required();
  gen->add_option("--templates", templates_path, "template TSV")->required();
  gen->add_option("--n", gen_count, "number of examples");
  gen->add_option("--seed", gen_seed, "generation seed");
  gen->add_option("--out", gen_out, "output directory")->required();

  std::string pred_path, eval_gold_path;
  CLI::App* eval = app.add_subcommand("eval", "score predictions against gold answers");
  eval->add_option("--pred", pred_path, "prediction records TSV")->required();
  eval->add_option("--gold", eval_gold_path, "gold records TSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (exec->parsed()) return run_exec(kg_dir, lf_text, batch_path);
    if (link->parsed()) return run_link(kg_dir, utterance_path, link_gold_path);
    if (graph->parsed()) return run_graph(kg_dir, graph_out);
    if (gat->parsed()) return run_gat(graph_path, emb_path, gat_seed, gat_heads, gat_din, gat_dout);
    if (gen->parsed()) return run_gen(kg_dir, templates_path, gen_count, gen_seed, gen_out);
    if (eval->parsed()) return run_eval(pred_path, eval_gold_path);
  } catch (const lasagne::IoError& e) {
    std::cerr << "io error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
