#include "tensprov/bench.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <random>

#include "tensprov/csv.hpp"
#include "tensprov/pipeline.hpp"
#include "tensprov/query.hpp"

namespace tensprov {

namespace {

constexpr std::array kFirstNames = {"James", "Mary", "Robert", "Patricia", "John", "Jennifer", "Michael",
                                    "Linda", "David", "Elizabeth", "William", "Barbara", "Richard", "Susan"};
constexpr std::array kLastNames = {"Smith", "Johnson", "Williams", "Brown", "Jones", "Garcia", "Miller",
                                   "Davis", "Rodriguez", "Martinez", "Hernandez", "Lopez", "Gonzalez", "Wilson"};
constexpr std::array kStreets = {"Maple Avenue", "Oak Street", "Pine Road", "Cedar Lane", "Elm Boulevard",
                                 "Washington Street", "Lake Drive", "Hillcrest Court", "Sunset Terrace"};
constexpr std::array kCities = {"Springfield", "Riverside", "Fairview", "Madison", "Georgetown",
                                "Arlington", "Salem", "Clinton", "Ashland", "Burlington"};
constexpr std::array kStates = {"NY", "CA", "TX", "FL", "IL", "PA", "OH", "GA", "NC", "MI"};
constexpr std::array kWords = {"quarterly", "rebalance", "position", "margin", "settlement", "account",
                               "dividend", "reinvest", "portfolio", "limit", "order", "filled", "partial",
                               "client", "request", "broker", "review", "compliance", "transfer", "hold"};
constexpr std::array kStatus = {"Completed", "Pending", "Canceled", "Submitted", "Active"};
constexpr std::array kTradeTypes = {"Market Buy", "Market Sell", "Limit Buy", "Limit Sell", "Stop Loss"};
constexpr std::array kExchanges = {"NYSE", "NASDAQ", "AMEX", "PCX"};

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }

  template <typename A>
  std::string pick(const A& options) {
    return options[below(options.size())];
  }

  std::string digits(std::size_t n) {
    std::string s(n, '0');
    for (auto& c : s) c = static_cast<char>('0' + below(10));
    return s;
  }

  std::string sentence(std::size_t words) {
    std::string s;
    for (std::size_t k = 0; k < words; ++k) {
      if (k) s += ' ';
      s += pick(kWords);
    }
    return s;
  }

  std::string timestamp() {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d %02d:%02d:%02d", static_cast<int>(2010 + below(8)),
                  static_cast<int>(1 + below(12)), static_cast<int>(1 + below(28)), static_cast<int>(below(24)),
                  static_cast<int>(below(60)), static_cast<int>(below(60)));
    return buf;
  }

  std::string date() { return timestamp().substr(0, 10); }

 private:
  std::mt19937_64 rng_;
};

Schema trade_schema() {
  return Schema({{"TradeID", CellType::Integer},      {"CustomerID", CellType::Integer},
                 {"AccountID", CellType::Integer},    {"SecurityID", CellType::Text},
                 {"TradeDate", CellType::Text},       {"SettlementDate", CellType::Text},
                 {"Status", CellType::Text},          {"TradeType", CellType::Text},
                 {"IsCash", CellType::Boolean},       {"Quantity", CellType::Integer},
                 {"BidPrice", CellType::Real},        {"TradePrice", CellType::Real},
                 {"Fee", CellType::Real},             {"Commission", CellType::Real},
                 {"Tax", CellType::Real},             {"ExecutedBy", CellType::Text},
                 {"Broker", CellType::Text},          {"Exchange", CellType::Text},
                 {"CashDescription", CellType::Text}, {"Comment", CellType::Text},
                 {"HoldingNote", CellType::Text},     {"BatchID", CellType::Integer}});
}

Schema customer_schema() {
  return Schema({{"CustomerID", CellType::Integer}, {"TaxID", CellType::Text},
                 {"Status", CellType::Text},        {"LastName", CellType::Text},
                 {"FirstName", CellType::Text},     {"MiddleInitial", CellType::Text},
                 {"Gender", CellType::Text},        {"Tier", CellType::Integer},
                 {"DOB", CellType::Text},           {"AddressLine1", CellType::Text},
                 {"AddressLine2", CellType::Text},  {"PostalCode", CellType::Text},
                 {"City", CellType::Text},          {"StateProv", CellType::Text},
                 {"Country", CellType::Text},       {"Phone1", CellType::Text},
                 {"Phone2", CellType::Text},        {"Email1", CellType::Text},
                 {"Email2", CellType::Text},        {"NationalTaxRate", CellType::Real},
                 {"LocalTaxRate", CellType::Real},  {"EffectiveDate", CellType::Text}});
}

double cents(double v) { return static_cast<double>(static_cast<std::int64_t>(v * 100.0)) / 100.0; }

}  // namespace

std::pair<Dataset, Dataset> generate_tables(const BenchConfig& config) {
  const std::size_t left_rows = config.rows_per_sf_left * config.scale_factor;
  const std::size_t right_rows = config.rows_per_sf_right * config.scale_factor;
  Gen g(mix_seed(config.seed, config.scale_factor, 0));

  std::vector<Row> customers;
  customers.reserve(right_rows);
  for (std::size_t j = 0; j < right_rows; ++j) {
    const std::string first = g.pick(kFirstNames);
    const std::string last = g.pick(kLastNames);
    const std::string email = first + "." + last + g.digits(3);
    customers.push_back({Cell::integer(static_cast<std::int64_t>(j)),
                         Cell::text(g.digits(3) + "-" + g.digits(2) + "-" + g.digits(4)),
                         Cell::text(g.pick(kStatus)),
                         Cell::text(last),
                         Cell::text(first),
                         g.chance(0.3) ? Cell::null() : Cell::text(std::string(1, static_cast<char>('A' + g.below(26)))),
                         Cell::text(g.chance(0.5) ? "F" : "M"),
                         Cell::integer(static_cast<std::int64_t>(1 + g.below(3))),
                         Cell::text(g.date()),
                         Cell::text(g.digits(4) + " " + g.pick(kStreets)),
                         g.chance(0.7) ? Cell::null() : Cell::text("Suite " + g.digits(3)),
                         Cell::text(g.digits(5)),
                         Cell::text(g.pick(kCities)),
                         Cell::text(g.pick(kStates)),
                         Cell::text("United States of America"),
                         Cell::text("(" + g.digits(3) + ") " + g.digits(3) + "-" + g.digits(4)),
                         g.chance(0.5) ? Cell::null() : Cell::text("(" + g.digits(3) + ") " + g.digits(3) + "-" + g.digits(4)),
                         Cell::text(email + "@example.com"),
                         g.chance(0.5) ? Cell::null() : Cell::text(email + "@mail.example.org"),
                         Cell::real(cents(g.uniform(0.05, 0.4))),
                         Cell::real(cents(g.uniform(0.0, 0.1))),
                         Cell::text(g.timestamp())});
  }

  std::vector<Row> trades;
  trades.reserve(left_rows);
  for (std::size_t i = 0; i < left_rows; ++i) {
    const bool match = right_rows > 0 && g.chance(config.match_rate);
    const auto key = static_cast<std::int64_t>(match ? g.below(right_rows) : right_rows + g.below(right_rows + 1));
    const double bid = cents(g.uniform(5.0, 500.0));
    trades.push_back({Cell::integer(static_cast<std::int64_t>(i)),
                      Cell::integer(key),
                      Cell::integer(static_cast<std::int64_t>(g.below(10 * (right_rows + 1)))),
                      Cell::text("SEC-" + g.digits(8)),
                      Cell::text(g.timestamp()),
                      Cell::text(g.timestamp()),
                      Cell::text(g.pick(kStatus)),
                      Cell::text(g.pick(kTradeTypes)),
                      Cell::boolean(g.chance(0.8)),
                      Cell::integer(static_cast<std::int64_t>(1 + g.below(5000))),
                      Cell::real(bid),
                      Cell::real(cents(bid * g.uniform(0.97, 1.03))),
                      Cell::real(cents(g.uniform(0.0, 25.0))),
                      Cell::real(cents(g.uniform(0.0, 60.0))),
                      Cell::real(cents(g.uniform(0.0, 40.0))),
                      Cell::text(std::string(g.pick(kFirstNames)) + " " + g.pick(kLastNames)),
                      Cell::text("Broker " + g.digits(4) + " " + g.pick(kCities) + " Branch"),
                      Cell::text(g.pick(kExchanges)),
                      Cell::text(g.sentence(6)),
                      Cell::text(g.sentence(12)),
                      g.chance(0.4) ? Cell::null() : Cell::text(g.sentence(8)),
                      Cell::integer(static_cast<std::int64_t>(1 + g.below(64)))});
  }
  return {Dataset("trades", trade_schema(), std::move(trades)),
          Dataset("customers", customer_schema(), std::move(customers))};
}

BenchResult run_bench(const BenchConfig& config) {
  auto [left, right] = generate_tables(config);
  BenchResult r;
  r.sf = config.scale_factor;
  r.left_rows = left.row_count();
  r.right_rows = right.row_count();
  r.input_csv_bytes = write_csv(left).size() + write_csv(right).size();

  Pipeline p;
  p.add_source(std::move(left));
  p.add_source(std::move(right));
  const std::size_t key_l = p.schema("trades").position_of("CustomerID");
  const std::size_t key_r = p.schema("customers").position_of("CustomerID");
  const OpRecord& op = p.run({"join", "trades_customers"}, JoinParams{{{key_l, key_r}}, JoinKind::Inner},
                             {"trades", "customers"});
  r.capture_ms = op.capture_ms;
  r.out_rows = p.row_count("trades_customers");
  for (const auto& t : op.tensors) r.tensor_bytes += t.tensor.memory_bytes();

  Gen pick(mix_seed(config.seed, config.scale_factor, 1));
  const std::size_t samples = r.left_rows ? config.query_samples : 0;
  std::vector<RecordRef> queries;
  for (std::size_t k = 0; k < samples; ++k) {
    queries.push_back({"trades", static_cast<RowIndex>(pick.below(r.left_rows))});
  }
  // Median over rounds of whole-batch timings; one untimed warm-up pass.
  std::size_t sink = 0;
  std::vector<double> rounds;
  for (std::size_t round = 0; round <= config.query_rounds && samples; ++round) {
    const auto start = std::chrono::steady_clock::now();
    for (const auto& q : queries) sink += q_forward_records(p, q, "trades_customers").size();
    const std::chrono::duration<double, std::milli> took = std::chrono::steady_clock::now() - start;
    if (round > 0) rounds.push_back(took.count() / static_cast<double>(samples));
  }
  if (!rounds.empty()) {
    std::nth_element(rounds.begin(), rounds.begin() + rounds.size() / 2, rounds.end());
    r.q1_avg_ms = rounds[rounds.size() / 2];
  }
  r.q1_hits = sink / std::max<std::size_t>(1, config.query_rounds + 1);
  return r;
}

std::string bench_csv_header() { return "sf,left_rows,right_rows,out_rows,capture_ms,tensor_bytes,q1_avg_ms"; }

std::string bench_csv_row(const BenchResult& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%zu,%.3f,%zu,%.3f", r.sf, r.left_rows, r.right_rows, r.out_rows,
                r.capture_ms, r.tensor_bytes, r.q1_avg_ms);
  return buf;
}

json bench_to_json(const BenchResult& r) {
  return {{"sf", r.sf},
          {"left_rows", r.left_rows},
          {"right_rows", r.right_rows},
          {"out_rows", r.out_rows},
          {"capture_ms", round_ms(r.capture_ms)},
          {"tensor_bytes", r.tensor_bytes},
          {"q1_avg_ms", round_ms(r.q1_avg_ms)},
          {"input_csv_bytes", r.input_csv_bytes}};
}

}  // namespace tensprov
