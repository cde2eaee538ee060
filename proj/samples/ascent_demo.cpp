// Threshold-couple search demo: wrap the two-threshold selection plus a 3-NN
// classifier into a grid evaluator and let randomized-restart steepest
// ascent hunt for a good couple.
#include <iostream>

#include <hsiselect/ascent.hpp>
#include <hsiselect/evaluation.hpp>
#include <hsiselect/synthetic.hpp>

using namespace hsi;

int main() {
    SyntheticSpec spec;
    spec.width = 48;
    spec.height = 48;
    spec.n_classes = 6;
    spec.relevant_bands = 3;
    spec.redundant_copies_per_relevant = 2;
    spec.noise_bands = 6;
    SyntheticData data = generate_synthetic(spec, 9);

    LabeledSplit split = random_split(data.gt, 0.5, 3);
    ClassifierSpec knn;
    knn.kind = ClassifierSpec::Kind::knn;
    knn.k = 3;
    ThresholdEvaluator evaluator(data.cube, data.gt, split, knn, 32);

    ThresholdGrid grid{{0.2, 0.4, 0.6, 0.8, 0.9, 1.0}, {0.0, 0.2, 0.4, 0.6}};
    GridEvaluator couples(grid, [&](SelectionThresholds th) { return evaluator.evaluate(th); });

    MultistartResult result = multistart(couples, 5, 17);
    for (const auto& r : result.all) {
        auto s = thresholds_at(grid, r.start_point);
        auto f = thresholds_at(grid, r.final_point);
        std::cout << "restart " << r.restart_index << ": (" << s.th_redundancy << ", "
                  << s.th_relevance << ") -> (" << f.th_redundancy << ", " << f.th_relevance
                  << ") in " << r.trajectory.size() << " steps: " << r.final_record.n_bands
                  << " bands, " << r.final_record.accuracy << "%\n";
    }

    auto best = thresholds_at(grid, result.best.final_point);
    std::cout << "best couple: th_redundancy=" << best.th_redundancy
              << ", th_relevance=" << best.th_relevance << " -> "
              << result.best.final_record.n_bands << " bands at "
              << result.best.final_record.accuracy << "%\n";
    std::cout << "distinct couples evaluated: " << couples.distinct_evaluations()
              << ", classifier invocations: " << evaluator.classifier_invocations() << "\n";
    return 0;
}
