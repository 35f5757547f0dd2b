#include <chrono>

#include "brt/smcalculus.hpp"

namespace brt::smcalculus {

mpq_class C_const(int k, int n) {
  if (2 * k + n <= 3) throw DomainError("C(k,n) needs 2k+n > 3");
  mpq_class c(2 * k + n - 1, 2 * k + n - 3);
  c.canonicalize();
  return c;
}

mpq_class B_const(int k, int N, int n) {
  if (2 * k + n <= 3) throw DomainError("B(k,N,n) needs 2k+n > 3");
  mpq_class b(1);
  for (int l = 1; l <= N; ++l) b *= C_const(k + 2 * l, n);
  return b;
}

bool prodest_holds(int k, int N, int n, const mpq_class& B) {
  const mpz_class d(2 * k + n - 3);
  return B.get_num() * B.get_num() * d <= B.get_den() * B.get_den() * (d + 4 * N);
}

ConstantsTable constants(std::pair<int, int> k_range, std::pair<int, int> N_range, std::pair<int, int> n_range) {
  const auto start = std::chrono::steady_clock::now();
  ConstantsTable table;
  for (int n = n_range.first; n <= n_range.second; ++n)
    for (int k = k_range.first; k <= k_range.second; ++k) {
      if (2 * k + n <= 3) throw DomainError("constants table needs 2k+n > 3 for every entry");
      const mpz_class d(2 * k + n - 3);
      // Unreduced running product; the inequality is homogeneous in (num, den).
      mpz_class num(1), den(1);
      for (int l = 1; l < N_range.first; ++l) {
        num *= 2 * (k + 2 * l) + n - 1;
        den *= 2 * (k + 2 * l) + n - 3;
      }
      for (int N = N_range.first; N <= N_range.second; ++N) {
        if (N >= 1) {
          num *= 2 * (k + 2 * N) + n - 1;
          den *= 2 * (k + 2 * N) + n - 3;
        }
        const bool holds = num * num * d <= den * den * (d + 4 * N);
        table.entries.push_back({k, N, n, mpq_class(num, den).get_d(), holds});
      }
    }
  table.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return table;
}

bool prodest_check(const ConstantsTable& table) {
  for (const auto& e : table.entries)
    if (!e.holds) return false;
  return true;
}

nlohmann::json to_json(const ConstantsTable& table) {
  std::size_t failures = 0;
  for (const auto& e : table.entries) failures += !e.holds;
  const mpq_class c32 = C_const(3, 2);
  return {{"entries", table.entries.size()},
          {"failures", failures},
          {"prodest_holds", failures == 0},
          {"C_3_2", c32.get_str()},
          {"B_3_2_2", B_const(3, 2, 2).get_str()}};
}

}  // namespace brt::smcalculus
