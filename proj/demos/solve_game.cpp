// Solves a small constant-sum game two ways (minimax LP and support
// enumeration) and prints the equilibrium, the empirical-play epsilon, and
// the divergence between the two profiles.

#include <iostream>

#include "spotkick/nash.hpp"
#include "spotkick/stats.hpp"

int main() {
  using namespace spotkick;

  Eigen::MatrixXd payoff(2, 2);
  payoff << 0.70, 0.91, 0.89, 0.64;  // kicker scoring probabilities

  const auto solution = nash::solve_constant_sum(payoff);
  std::cout << "LP Nash\n";
  std::cout << "  kicker: " << solution.profile.row.transpose() << "\n";
  std::cout << "  keeper: " << solution.profile.col.transpose() << "\n";
  std::cout << "  value:  " << solution.value << "\n\n";

  const auto game = nash::BimatrixGame::constant_sum(payoff);
  const auto enumerated = nash::solve_support_enumeration(game, 2);
  std::cout << "support enumeration found " << enumerated.equilibria.size() << " equilibrium\n\n";

  nash::MixedProfile observed;
  observed.row = Eigen::Vector2d(0.55, 0.45);
  observed.col = Eigen::Vector2d(0.60, 0.40);
  const auto eps = nash::epsilon_of_profile(game, observed);
  std::cout << "observed play: epsilon " << eps.epsilon << " (kicker gain " << eps.row_gain
            << ", keeper gain " << eps.col_gain << ")\n";
  std::cout << "JSD(Nash, observed): " << stats::game_jsd(solution.profile, observed) << " nats\n";
  return 0;
}
