#include "gfactor/checkpoint.hpp"

#include <array>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gfactor/error.hpp"

namespace gfactor {

namespace {

constexpr std::array<char, 8> kMagic = {'G', 'F', 'C', 'K', 'P', 'T', '\0', '\1'};

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}
    void u64(std::uint64_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
    void i64(std::int64_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
    void f64(double v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
    void matrix(const Matrix& m) {
        i64(m.rows());
        i64(m.cols());
        out_.write(reinterpret_cast<const char*>(m.data()), static_cast<std::streamsize>(sizeof(double) * m.size()));
    }
    void vector(const Vector& v) {
        i64(v.size());
        out_.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(sizeof(double) * v.size()));
    }
    void string(const std::string& s) {
        u64(s.size());
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }

private:
    std::ostream& out_;
};

class Reader {
public:
    Reader(std::istream& in, std::string where) : in_(in), where_(std::move(where)) {}
    void raw(void* dst, std::size_t len) {
        in_.read(static_cast<char*>(dst), static_cast<std::streamsize>(len));
        if (!in_) throw DataError(where_ + ": truncated checkpoint");
    }
    std::uint64_t u64() {
        std::uint64_t v;
        raw(&v, sizeof v);
        return v;
    }
    std::int64_t i64() {
        std::int64_t v;
        raw(&v, sizeof v);
        return v;
    }
    double f64() {
        double v;
        raw(&v, sizeof v);
        return v;
    }
    Index dim() {
        const std::int64_t v = i64();
        if (v < 0 || v > (std::int64_t{1} << 32)) throw DataError(where_ + ": corrupt checkpoint dimension");
        return static_cast<Index>(v);
    }
    Matrix matrix() {
        const Index r = dim(), c = dim();
        Matrix m(r, c);
        raw(m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
        return m;
    }
    Vector vector() {
        Vector v(dim());
        raw(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
        return v;
    }
    std::string string() {
        const std::uint64_t len = u64();
        if (len > (std::uint64_t{1} << 28)) throw DataError(where_ + ": corrupt checkpoint string");
        std::string s(len, '\0');
        raw(s.data(), len);
        return s;
    }

private:
    std::istream& in_;
    std::string where_;
};

void write_state(Writer& w, const ChainState& s) {
    w.matrix(s.B);
    w.matrix(s.Lambda);
    w.matrix(s.F);
    w.matrix(s.Fa);
    w.i64(s.h2_grid);
    w.i64(s.h2_index.size());
    for (Index j = 0; j < s.h2_index.size(); ++j) w.i64(s.h2_index(j));
    w.matrix(s.Delta);
    w.matrix(s.Phi);
    w.vector(s.delta_shrink);
    w.vector(s.psi_a_prec);
    w.vector(s.sigma2_prec);
    w.vector(s.imputed);
}

ChainState read_state(Reader& r) {
    ChainState s;
    s.B = r.matrix();
    s.Lambda = r.matrix();
    s.F = r.matrix();
    s.Fa = r.matrix();
    s.h2_grid = static_cast<int>(r.i64());
    s.h2_index.resize(r.dim());
    for (Index j = 0; j < s.h2_index.size(); ++j) s.h2_index(j) = static_cast<int>(r.i64());
    s.Delta = r.matrix();
    s.Phi = r.matrix();
    s.delta_shrink = r.vector();
    s.psi_a_prec = r.vector();
    s.sigma2_prec = r.vector();
    s.imputed = r.vector();
    s.refresh_tau();
    return s;
}

}  // namespace

void save_checkpoint(const Checkpoint& cp, const std::filesystem::path& path) {
    // Write beside the target and rename so a crash never leaves a torn file.
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot write checkpoint " + tmp.string());
        out.write(kMagic.data(), kMagic.size());
        Writer w(out);
        w.u64(Checkpoint::kVersion);
        w.i64(cp.next_iteration);
        w.u64(cp.rng_seed);
        w.u64(cp.rng_stream);
        w.string(cp.rng_state);
        write_state(w, cp.state);
        w.matrix(cp.working_Y);
        w.u64(cp.samples.provenance_digest);
        w.u64(cp.samples.draws.size());
        for (const auto& d : cp.samples.draws) {
            w.i64(d.iteration);
            w.matrix(d.Lambda);
            w.vector(d.h2);
            w.vector(d.psi_a);
            w.vector(d.sigma2);
            w.matrix(d.B);
        }
        w.matrix(cp.samples.G_sum);
        w.matrix(cp.samples.R_sum);
        w.matrix(cp.samples.P_sum);
        w.vector(cp.samples.imputed_sum);
        out.flush();
        if (!out) throw DataError("failed writing checkpoint " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw DataError(path.string() + ": not a checkpoint file");
    Reader r(in, path.string());
    const std::uint64_t version = r.u64();
    if (version != Checkpoint::kVersion)
        throw DataError(path.string() + ": unsupported checkpoint version " + std::to_string(version));
    Checkpoint cp;
    cp.next_iteration = static_cast<long>(r.i64());
    cp.rng_seed = r.u64();
    cp.rng_stream = r.u64();
    cp.rng_state = r.string();
    cp.state = read_state(r);
    cp.working_Y = r.matrix();
    cp.samples.provenance_digest = r.u64();
    const std::uint64_t count = r.u64();
    if (count > (std::uint64_t{1} << 32)) throw DataError(path.string() + ": corrupt draw count");
    cp.samples.draws.reserve(count);
    for (std::uint64_t c = 0; c < count; ++c) {
        PosteriorDraw d;
        d.iteration = static_cast<long>(r.i64());
        d.Lambda = r.matrix();
        d.h2 = r.vector();
        d.psi_a = r.vector();
        d.sigma2 = r.vector();
        d.B = r.matrix();
        cp.samples.draws.push_back(std::move(d));
    }
    cp.samples.G_sum = r.matrix();
    cp.samples.R_sum = r.matrix();
    cp.samples.P_sum = r.matrix();
    cp.samples.imputed_sum = r.vector();
    if (in.peek() != std::char_traits<char>::eof()) throw DataError(path.string() + ": trailing bytes in checkpoint");
    return cp;
}

}  // namespace gfactor
