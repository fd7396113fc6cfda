#include "dknn/verify.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <numeric>
#include <sstream>

#include "dknn/io.hpp"

namespace dknn {

double chi_square_uniform(const std::vector<std::uint64_t>& observed) {
    if (observed.size() < 2)
        throw std::invalid_argument("chi_square: need at least 2 cells");
    const std::uint64_t total =
        std::accumulate(observed.begin(), observed.end(), std::uint64_t{0});
    const double expected =
        static_cast<double>(total) / static_cast<double>(observed.size());
    if (expected < 5.0)
        throw std::invalid_argument("chi_square: expected count below 5");
    double stat = 0.0;
    for (std::uint64_t o : observed) {
        const double diff = static_cast<double>(o) - expected;
        stat += diff * diff / expected;
    }
    const boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

std::string TrialReport::csv_row() const {
    std::ostringstream os;
    os << k << ',' << l << ',' << n << ',' << algo << ',' << trial << ','
       << rounds << ',' << messages << ',' << survivors << ','
       << (fallback ? 1 : 0) << ',' << (correct ? 1 : 0);
    return os.str();
}

namespace {

Point make_point(std::uint64_t id, std::vector<std::int64_t> coords) {
    Point p;
    p.id = id;
    p.coords = std::move(coords);
    return p;
}

Dataset from_machines(const std::vector<std::vector<Point>>& machines,
                      std::size_t dim) {
    Dataset ds;
    ds.dim = dim;
    for (const auto& part : machines)
        for (const Point& p : part) ds.points.push_back(p);
    return ds;
}

}  // namespace

std::vector<AdversarialInstance> adversarial_instances() {
    std::vector<AdversarialInstance> out;

    {
        // Every point identical; only the id tie-break decides.
        AdversarialInstance inst;
        inst.name = "all-duplicates";
        const int k = 4;
        inst.machines.resize(k);
        for (std::uint64_t i = 0; i < 64; ++i)
            inst.machines[i % k].push_back(
                make_point((i % k) << 8 | (i / k), {42, 42}));
        inst.ds = from_machines(inst.machines, 2);
        inst.q = make_point(~std::uint64_t{0}, {0, 0});
        inst.l = 32;
        out.push_back(std::move(inst));
    }
    {
        AdversarialInstance inst;
        inst.name = "one-machine-holds-all";
        inst.machines.resize(8);
        for (std::uint64_t i = 0; i < 500; ++i)
            inst.machines[3].push_back(
                make_point(i, {static_cast<std::int64_t>(i * 7 % 997)}));
        inst.ds = from_machines(inst.machines, 1);
        inst.q = make_point(~std::uint64_t{0}, {500});
        inst.l = 40;
        inst.metric = Metric::L1;
        out.push_back(std::move(inst));
    }
    {
        AdversarialInstance inst;
        inst.name = "empty-machines";
        inst.machines.resize(6);
        for (std::uint64_t i = 0; i < 200; ++i)
            inst.machines[i % 2].push_back(
                make_point(i, {static_cast<std::int64_t>(i * 13 % 541),
                               static_cast<std::int64_t>(i * 31 % 769)}));
        inst.ds = from_machines(inst.machines, 2);
        inst.q = make_point(~std::uint64_t{0}, {100, 100});
        inst.l = 17;
        out.push_back(std::move(inst));
    }
    {
        AdversarialInstance inst;
        inst.name = "l-equals-one";
        Dataset ds = generate_dataset(300, 2, 4, 77, Distribution::Uniform);
        inst.machines = partition(ds, 4, 77, PartitionPolicy::UniformRandom);
        inst.ds = std::move(ds);
        inst.q = random_query(2, 77, 0);
        inst.l = 1;
        out.push_back(std::move(inst));
    }
    {
        AdversarialInstance inst;
        inst.name = "l-equals-n";
        Dataset ds = generate_dataset(256, 1, 8, 78, Distribution::Uniform);
        inst.machines = partition(ds, 8, 78, PartitionPolicy::RoundRobin);
        inst.ds = std::move(ds);
        inst.q = random_query(1, 78, 0);
        inst.l = 256;
        out.push_back(std::move(inst));
    }
    {
        AdversarialInstance inst;
        inst.name = "clustered-skew";
        Dataset ds = generate_dataset(2000, 2, 8, 79, Distribution::Clustered);
        inst.machines = partition(ds, 8, 79, PartitionPolicy::UniformRandom);
        inst.ds = std::move(ds);
        inst.q = random_query(2, 79, 0);
        inst.l = 128;
        inst.metric = Metric::LInf;
        out.push_back(std::move(inst));
    }
    {
        AdversarialInstance inst;
        inst.name = "geometric-skew";
        Dataset ds = generate_dataset(2000, 1, 16, 80, Distribution::Geometric);
        inst.machines = partition(ds, 16, 80, PartitionPolicy::UniformRandom);
        inst.ds = std::move(ds);
        inst.q = make_point(~std::uint64_t{0}, {0});
        inst.l = 256;
        inst.metric = Metric::L1;
        out.push_back(std::move(inst));
    }
    {
        AdversarialInstance inst;
        inst.name = "empty-dataset-l-zero";
        inst.machines.resize(3);
        inst.ds.dim = 1;
        inst.q = make_point(~std::uint64_t{0}, {0});
        inst.l = 0;
        out.push_back(std::move(inst));
    }
    return out;
}

}  // namespace dknn
