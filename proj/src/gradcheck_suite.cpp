#include "itema2c/gradcheck_suite.hpp"

#include <functional>
#include <stdexcept>

#include "itema2c/grad_check.hpp"
#include "itema2c/losses.hpp"
#include "itema2c/policy.hpp"

namespace itema2c {

using nn::Matrix;
using nn::ParameterStore;
using Batch = std::span<const Transition>;

SmallProblem make_small_problem(std::uint64_t seed, std::size_t batch_size, std::size_t list_size) {
  SmallProblem p;
  p.env.n_items = 12;
  p.env.dim = 4;
  p.env.list_size = list_size;
  p.env.max_depth = 5;
  p.env.batch_users = 4;
  p.env.n_users = 6;
  p.env.n_topics = 3;
  p.env.click_bias = -1.0;
  p.env.click_scale = 3.0;
  p.env.patience_init = 4.0;
  p.env.history_window = 8;
  p.env.seed = seed;

  p.dims.n_users = p.env.n_users;
  p.dims.n_items = p.env.n_items;
  p.dims.user_dim = 3;
  p.dims.item_dim = 4;
  p.dims.state_dim = 4;
  p.dims.hidden = 5;
  p.dims.init_scale = 0.5;

  UserEnvironment env(p.env);
  auto sessions = env.reset();
  Rng rng(seed * 7919 + 3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::vector<double> flat(p.env.n_items, 0.0);
  std::vector<Transition> all;
  for (int step = 0; step < 6; ++step) {
    for (auto& s : sessions) {
      if (s.done) s = env.new_session();
      Transition t;
      t.obs = std::make_shared<Observation>(env.observation_of(s));
      t.action = RecList(sample_without_replacement(flat, list_size, rng));
      auto outcome = env.step(s, t.action);
      t.feedback = outcome.feedback;
      t.done = outcome.done;
      t.next_obs = std::make_shared<Observation>(env.observation_of(outcome.next));
      for (nn::Index j = 0; j < p.dims.item_dim; ++j) t.hyper_action.push_back(gauss(rng));
      all.push_back(std::move(t));
      s = std::move(outcome.next);
    }
  }
  if (all.size() < batch_size) throw std::logic_error("small problem produced too few transitions");
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  for (std::size_t b = 0; b < batch_size; ++b) p.batch.push_back(all[pick(rng)]);
  return p;
}

std::vector<std::string> gradcheck_families() {
  return {"critic_td",   "request_actor", "item_actor",  "weight_model",   "slateq",
          "ddpg_critic", "ddpg_actor",    "supervision", "hac_critic",     "hac_actor",
          "hac_hyper",   "hac_supervision", "critic_item_td"};
}

namespace {

struct Instance {
  SmallProblem problem;
  Rng rng;
  std::normal_distribution<double> gauss{0.0, 1.0};

  explicit Instance(std::uint64_t seed) : problem(make_small_problem(seed)), rng(seed ^ 0x5bd1e995u) {}

  Batch batch() const { return problem.batch; }
  std::size_t size() const { return problem.batch.size(); }
  std::size_t k() const { return problem.env.list_size; }

  std::vector<double> random_vector(std::size_t n, double scale = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) x = scale * gauss(rng);
    return v;
  }
  Matrix random_matrix(nn::Index rows, nn::Index cols, double scale = 1.0) {
    Matrix m(rows, cols);
    for (nn::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * gauss(rng);
    return m;
  }
};

using LossFn = std::function<double(const ParameterStore&, ParameterStore*)>;

nn::GradCheckReport check(ParameterStore& store, const LossFn& fn, const nn::GradCheckOptions& options) {
  return nn::grad_check(
      store, [&](const ParameterStore& s) { return fn(s, nullptr); }, [&](ParameterStore& s) { fn(s, &s); }, options);
}

template <class Net>
ParameterStore declared(const Net& net, Rng& rng) {
  ParameterStore s;
  net.declare(s, rng);
  return s;
}

nn::GradCheckReport run_family(const std::string& family, Instance& in, const nn::GradCheckOptions& options) {
  const auto& dims = in.problem.dims;
  const Batch batch = in.batch();
  const auto n = static_cast<nn::Index>(in.size());
  const auto k = static_cast<nn::Index>(in.k());
  const double gamma = 0.9;

  if (family == "critic_td") {
    nn::ValueNet net("critic", dims);
    auto store = declared(net, in.rng);
    const auto targets = in.random_vector(in.size(), 2.0);
    return check(store, [&](const ParameterStore& s, ParameterStore* sink) {
      return losses::critic_td_loss(net, s, sink, batch, targets);
    }, options);
  }
  if (family == "critic_item_td") {
    nn::ValueNet net("critic", dims);
    auto store = declared(net, in.rng);
    const Matrix w = nn::WeightNet::normalize(in.random_matrix(n, k));
    const auto v_next = in.random_vector(in.size(), 2.0);
    return check(store, [&](const ParameterStore& s, ParameterStore* sink) {
      return losses::critic_item_td_loss(net, s, sink, batch, w, gamma, v_next);
    }, options);
  }
  if (family == "request_actor" || family == "hac_actor") {
    nn::ActorNet net("actor", dims);
    auto store = declared(net, in.rng);
    const auto adv = in.random_vector(in.size());
    return check(store, [&](const ParameterStore& s, ParameterStore* sink) {
      return losses::request_actor_loss(net, s, sink, batch, adv);
    }, options);
  }
  if (family == "item_actor") {
    nn::ActorNet net("actor", dims);
    auto store = declared(net, in.rng);
    const Matrix adv = in.random_matrix(n, k);
    return check(store, [&](const ParameterStore& s, ParameterStore* sink) {
      return losses::item_actor_loss(net, s, sink, batch, adv);
    }, options);
  }
  if (family == "weight_model") {
    nn::WeightNet net("weight", dims);
    auto store = declared(net, in.rng);
    Matrix log_pi = -in.random_matrix(n, k).cwiseAbs();
    log_pi.array() -= 1.0;
    const auto v_now = in.random_vector(in.size(), 2.0);
    const auto v_next = in.random_vector(in.size(), 2.0);
    return check(store, [&](const ParameterStore& s, ParameterStore* sink) {
      return losses::weight_model_loss(net, s, sink, batch, log_pi, gamma, v_now, v_next);
    }, options);
  }
  if (family == "slateq") {
    nn::ActorNet net("q", dims);
    auto store = declared(net, in.rng);
    const Matrix y = in.random_matrix(n, k);
    return check(store, [&](const ParameterStore& s, ParameterStore* sink) {
      return losses::slateq_loss(net, s, sink, batch, y);
    }, options);
  }
  if (family == "ddpg_critic" || family == "hac_critic") {
    nn::ActionValueNet net("critic", dims);
    auto store = declared(net, in.rng);
    Matrix actions = losses::hyper_actions(batch);
    if (family == "hac_critic") {
      nn::InverseNet g("inverse", dims);
      const auto g_store = declared(g, in.rng);
      const Matrix table = in.random_matrix(static_cast<nn::Index>(dims.n_items), dims.item_dim);
      const auto ls = losses::lists(batch);
      actions = g.forward(g_store, nn::mean_item_embedding(table, ls));
    }
    const auto y = in.random_vector(in.size(), 2.0);
    return check(store, [&](const ParameterStore& s, ParameterStore* sink) {
      return losses::action_value_td_loss(net, s, sink, batch, actions, y);
    }, options);
  }
  if (family == "ddpg_actor") {
    nn::ActorNet actor("actor", dims);
    nn::ActionValueNet critic("critic", dims);
    auto store = declared(actor, in.rng);
    const auto critic_store = declared(critic, in.rng);
    return check(store, [&](const ParameterStore& s, ParameterStore* sink) {
      return losses::ddpg_actor_loss(actor, s, sink, critic, critic_store, batch);
    }, options);
  }
  if (family == "supervision" || family == "hac_supervision") {
    nn::ActorNet net("actor", dims);
    auto store = declared(net, in.rng);
    return check(store, [&](const ParameterStore& s, ParameterStore* sink) {
      return losses::supervision_loss(net, s, sink, batch);
    }, options);
  }
  if (family == "hac_hyper") {
    nn::InverseNet g("inverse", dims);
    auto store = declared(g, in.rng);
    const Matrix table = in.random_matrix(static_cast<nn::Index>(dims.n_items), dims.item_dim);
    return check(store, [&](const ParameterStore& s, ParameterStore* sink) {
      return losses::hac_hyper_loss(g, s, sink, batch, table);
    }, options);
  }
  throw std::invalid_argument("unknown gradient-check family '" + family + "'");
}

}  // namespace

std::vector<GradCheckFamilyResult> run_gradcheck_suite(const GradCheckSuiteOptions& options) {
  nn::GradCheckOptions gc;
  gc.tolerance = options.tolerance;
  gc.analytic_scale = options.inject_bug ? 1.1 : 1.0;
  std::vector<GradCheckFamilyResult> results;
  const auto families = gradcheck_families();
  for (std::size_t f = 0; f < families.size(); ++f) {
    GradCheckFamilyResult r;
    r.family = families[f];
    for (std::size_t i = 0; i < options.instances; ++i) {
      Instance in(options.seed + 1000 * f + i);
      const auto report = run_family(r.family, in, gc);
      ++r.instances;
      if (!report.passed) ++r.failures;
      if (!(report.max_rel_error <= r.max_rel_error)) {
        r.max_rel_error = report.max_rel_error;
        r.worst_param = report.worst_param;
      }
    }
    r.passed = r.failures == 0;
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace itema2c
