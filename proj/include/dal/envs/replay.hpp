#pragma once
// Replay data sources.
//
// Matrix format: first line "K,T", then K lines of T comma-separated mean
// rewards (arm x round). Logged format: header "t,candidates,displayed,reward"
// then one row per round with semicolon-joined candidate ids, the displayed
// id, and a binary reward.

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dal/envs/environment.hpp"

namespace dal::envs {

struct MatrixReplay {
    std::size_t n_arms = 0;
    long T = 0;
    std::vector<std::vector<double>> means;  // [arm][round]
};

struct LoggedReplay {
    struct Row {
        long t = 0;
        std::vector<std::size_t> candidates;  // dense remapped ids
        std::size_t displayed = 0;
        double reward = 0.0;
    };
    std::vector<Row> rows;
    std::size_t n_actions = 0;
    std::vector<long> raw_ids;  // dense id -> original id
};

namespace internal {

inline std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(line);
    while (std::getline(in, cur, sep)) out.push_back(cur);
    if (!line.empty() && line.back() == sep) out.push_back("");
    return out;
}

inline double parse_real(const std::string& s, const std::string& where) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("malformed replay file: bad number '" + s +
                                 "' in " + where);
    }
}

inline long parse_int(const std::string& s, const std::string& where) {
    const double v = parse_real(s, where);
    const long r = static_cast<long>(v);
    if (static_cast<double>(r) != v)
        throw std::runtime_error("malformed replay file: expected integer '" + s +
                                 "' in " + where);
    return r;
}

}  // namespace internal

inline MatrixReplay load_replay_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open replay file: " + path);
    std::string line;
    if (!std::getline(in, line))
        throw std::runtime_error("malformed replay file: empty file " + path);
    const auto header = internal::split(line, ',');
    if (header.size() != 2)
        throw std::runtime_error("malformed replay file: header must be K,T");
    MatrixReplay r;
    const long K = internal::parse_int(header[0], "header");
    r.T = internal::parse_int(header[1], "header");
    if (K < 1 || r.T < 1)
        throw std::runtime_error("malformed replay file: K and T must be positive");
    r.n_arms = static_cast<std::size_t>(K);
    for (long a = 0; a < K; ++a) {
        if (!std::getline(in, line))
            throw std::runtime_error("replay dimension mismatch: expected " +
                                     std::to_string(K) + " arm rows");
        const auto cells = internal::split(line, ',');
        if (static_cast<long>(cells.size()) != r.T)
            throw std::runtime_error(
                "replay dimension mismatch: arm row " + std::to_string(a) +
                " has " + std::to_string(cells.size()) + " entries, expected " +
                std::to_string(r.T));
        std::vector<double> row(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i)
            row[i] = internal::parse_real(cells[i], "arm row " + std::to_string(a));
        r.means.push_back(std::move(row));
    }
    return r;
}

inline LoggedReplay load_replay_logged(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open replay file: " + path);
    std::string line;
    if (!std::getline(in, line) || internal::split(line, ',').size() != 4)
        throw std::runtime_error(
            "malformed replay file: expected header t,candidates,displayed,reward");

    struct RawRow {
        long t;
        std::vector<long> candidates;
        long displayed;
        double reward;
    };
    std::vector<RawRow> raw;
    long line_no = 1;
    long prev_t = std::numeric_limits<long>::min();
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = "line " + std::to_string(line_no);
        const auto cells = internal::split(line, ',');
        if (cells.size() != 4)
            throw std::runtime_error("malformed replay file: expected 4 fields in " +
                                     where);
        RawRow row;
        row.t = internal::parse_int(cells[0], where);
        if (row.t <= prev_t)
            throw std::runtime_error("non-monotone timestamps in replay file at " +
                                     where);
        prev_t = row.t;
        for (const auto& tok : internal::split(cells[1], ';')) {
            if (tok.empty())
                throw std::runtime_error("malformed replay file: empty candidate id in " +
                                         where);
            row.candidates.push_back(internal::parse_int(tok, where));
        }
        if (row.candidates.empty())
            throw std::runtime_error("malformed replay file: no candidates in " + where);
        row.displayed = internal::parse_int(cells[2], where);
        row.reward = internal::parse_real(cells[3], where);
        if (row.reward != 0.0 && row.reward != 1.0)
            throw std::runtime_error("malformed replay file: reward must be 0 or 1 in " +
                                     where);
        bool found = false;
        for (long c : row.candidates) found = found || c == row.displayed;
        if (!found)
            throw std::runtime_error(
                "malformed replay file: displayed id not among candidates in " + where);
        raw.push_back(std::move(row));
    }

    LoggedReplay out;
    std::vector<long> ids;
    for (const auto& row : raw)
        for (long c : row.candidates) ids.push_back(c);
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    out.raw_ids = ids;
    out.n_actions = ids.size();
    auto dense = [&](long id) {
        return static_cast<std::size_t>(
            std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
    };
    out.rows.reserve(raw.size());
    for (const auto& row : raw) {
        LoggedReplay::Row r;
        r.t = row.t;
        r.reward = row.reward;
        for (long c : row.candidates) r.candidates.push_back(dense(c));
        r.displayed = dense(row.displayed);
        out.rows.push_back(std::move(r));
    }
    return out;
}

// Matrix replay as an environment: true means come from the matrix column of
// the current round; rewards are mean + optional noise (one draw per round).
class MatrixReplayEnv final : public MeanRewardEnv {
public:
    MatrixReplayEnv(MatrixReplay data, NoiseSpec noise, SplitMix64 rng)
        : data_(std::move(data)), noise_(noise), rng_(rng) {
        if (noise_.kind == NoiseSpec::Kind::bernoulli_of_mean) {
            for (const auto& row : data_.means)
                for (double v : row)
                    if (!(v >= 0.0 && v <= 1.0))
                        throw std::domain_error(
                            "MatrixReplayEnv: bernoulli rewards need means in [0,1]");
        }
        actions_.reserve(data_.n_arms);
        for (std::size_t a = 0; a < data_.n_arms; ++a) {
            Eigen::VectorXd e =
                Eigen::VectorXd::Zero(static_cast<Eigen::Index>(data_.n_arms));
            e[static_cast<Eigen::Index>(a)] = 1.0;
            actions_.push_back(std::move(e));
        }
    }

    long horizon() const override { return data_.T; }
    const ActionSet& actions() const override { return actions_; }
    long n_contexts() const override { return 1; }

    StepContext begin_round(long t) override {
        if (t != last_t_ + 1)
            throw std::logic_error("MatrixReplayEnv: rounds must advance in order");
        last_t_ = t;
        noise_value_ = noise_.kind == NoiseSpec::Kind::gaussian
                           ? std::sqrt(noise_.sigma2) * normal(rng_)
                           : uniform01(rng_);
        return {};
    }

    double true_mean(std::size_t action_id) const override {
        return data_.means[action_id][static_cast<std::size_t>(last_t_ - 1)];
    }

    double sample_reward(std::size_t action_id) override {
        const double mean = true_mean(action_id);
        if (noise_.kind == NoiseSpec::Kind::gaussian) return mean + noise_value_;
        return noise_value_ < mean ? 1.0 : 0.0;
    }

    const std::vector<long>& change_points() const override { return none_; }
    bool rewards_binary() const override {
        return noise_.kind == NoiseSpec::Kind::bernoulli_of_mean;
    }

private:
    MatrixReplay data_;
    NoiseSpec noise_;
    SplitMix64 rng_;
    ActionSet actions_;
    std::vector<long> none_;
    double noise_value_ = 0.0;
    long last_t_ = 0;
};

}  // namespace dal::envs
