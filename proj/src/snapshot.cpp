#include "mhdlab/snapshot.hpp"

#include <bit>
#include <cinttypes>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mhd {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const char* what) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument(std::string("snapshot: bad ") + what);
    }
    if (pos != s.size())
        throw std::invalid_argument(std::string("snapshot: bad ") + what);
    return v;
}

void put_le(std::string& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double get_le(const char* p) {
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i]))
                << (8 * i);
    return std::bit_cast<double>(bits);
}

std::string expect_kv(std::istream& in, const std::string& key) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("snapshot: truncated header");
    const std::string prefix = key + "=";
    if (line.rfind(prefix, 0) != 0)
        throw std::invalid_argument("snapshot: expected '" + key + "=' line");
    return line.substr(prefix.size());
}

}  // namespace

Grid Snapshot::grid() const {
    return dim == 2 ? Grid(modes[0], modes[1])
                    : Grid(modes[0], modes[1], modes[2]);
}

const SnapshotField* Snapshot::find(const std::string& name) const {
    for (const auto& f : fields)
        if (f.name == name) return &f;
    return nullptr;
}

Snapshot snapshot_of(const SpectralField& b, double time, double nu,
                     double eta) {
    const Grid& g = b.grid();
    Snapshot snap;
    snap.dim = g.dim;
    snap.modes = {g.modes[0], g.modes[1], g.modes[2]};
    snap.time = time;
    snap.nu = nu;
    snap.eta = eta;
    snap.fields.push_back({"b", to_physical(b)});
    return snap;
}

Snapshot snapshot_of(const SpectralField& u, const SpectralField& b,
                     double time, double nu, double eta) {
    if (u.grid() != b.grid())
        throw std::invalid_argument("snapshot_of: u and b grids differ");
    Snapshot snap = snapshot_of(b, time, nu, eta);
    snap.fields.insert(snap.fields.begin(), {"u", to_physical(u)});
    return snap;
}

SpectralField field_from(const Snapshot& snap, const std::string& name) {
    const SnapshotField* f = snap.find(name);
    if (f == nullptr)
        throw std::invalid_argument("snapshot: no field named '" + name + "'");
    return to_spectral(f->samples, snap.grid());
}

void write_snapshot(const Snapshot& snap, const std::string& path) {
    if (snap.fields.empty())
        throw std::invalid_argument("write_snapshot: no fields");
    const Grid g = snap.grid();  // validates dim/modes
    std::ostringstream header;
    header << "MHDSNAP1\n";
    header << "dim=" << snap.dim << "\n";
    header << "modes=" << snap.modes[0] << "," << snap.modes[1];
    if (snap.dim == 3) header << "," << snap.modes[2];
    header << "\n";
    header << "fields=";
    for (std::size_t i = 0; i < snap.fields.size(); ++i)
        header << (i ? "," : "") << snap.fields[i].name;
    header << "\n";
    header << "time=" << format_double(snap.time) << "\n";
    header << "nu=" << format_double(snap.nu) << "\n";
    header << "eta=" << format_double(snap.eta) << "\n";
    header << "\n";

    std::string payload;
    payload.reserve(snap.fields.size() * snap.dim * g.total() * 8);
    for (const auto& f : snap.fields) {
        if (static_cast<int>(f.samples.size()) != snap.dim)
            throw std::invalid_argument(
                "write_snapshot: component count must equal dim");
        for (const auto& comp : f.samples) {
            if (comp.size() != g.total())
                throw std::invalid_argument(
                    "write_snapshot: sample count must match the grid");
            for (double v : comp) put_le(payload, v);
        }
    }

    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("write_snapshot: cannot open " + tmp);
        out << header.str();
        out.write(payload.data(), static_cast<std::streamsize>(payload.size()));
        if (!out) throw std::runtime_error("write_snapshot: write failed");
    }
    std::filesystem::rename(tmp, path);
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("read_snapshot: cannot open " + path);

    std::string line;
    if (!std::getline(in, line) || line != "MHDSNAP1")
        throw std::invalid_argument("read_snapshot: bad magic");

    Snapshot snap;
    {
        const std::string v = expect_kv(in, "dim");
        if (v == "2") snap.dim = 2;
        else if (v == "3") snap.dim = 3;
        else throw std::invalid_argument("read_snapshot: dim must be 2 or 3");
    }
    {
        std::istringstream ms(expect_kv(in, "modes"));
        std::string tok;
        int idx = 0;
        while (std::getline(ms, tok, ',')) {
            if (idx >= snap.dim)
                throw std::invalid_argument("read_snapshot: too many modes");
            snap.modes[idx++] = static_cast<int>(parse_double(tok, "modes"));
        }
        if (idx != snap.dim)
            throw std::invalid_argument("read_snapshot: modes count != dim");
        if (snap.dim == 2) snap.modes[2] = 1;
    }
    std::vector<std::string> names;
    {
        std::istringstream fs(expect_kv(in, "fields"));
        std::string tok;
        while (std::getline(fs, tok, ',')) {
            if (tok != "u" && tok != "b")
                throw std::invalid_argument("read_snapshot: unknown field '" +
                                            tok + "'");
            names.push_back(tok);
        }
        if (names.empty())
            throw std::invalid_argument("read_snapshot: empty field list");
    }
    snap.time = parse_double(expect_kv(in, "time"), "time");
    snap.nu = parse_double(expect_kv(in, "nu"), "nu");
    snap.eta = parse_double(expect_kv(in, "eta"), "eta");
    if (!std::getline(in, line) || !line.empty())
        throw std::invalid_argument("read_snapshot: missing blank separator");

    const Grid g = snap.grid();
    const std::size_t per_comp = g.total() * 8;
    std::string buf(per_comp, '\0');
    for (const auto& name : names) {
        SnapshotField f;
        f.name = name;
        for (int c = 0; c < snap.dim; ++c) {
            in.read(buf.data(), static_cast<std::streamsize>(per_comp));
            if (static_cast<std::size_t>(in.gcount()) != per_comp)
                throw std::invalid_argument("read_snapshot: short payload");
            std::vector<double> comp(g.total());
            for (std::size_t i = 0; i < comp.size(); ++i)
                comp[i] = get_le(buf.data() + 8 * i);
            f.samples.push_back(std::move(comp));
        }
        snap.fields.push_back(std::move(f));
    }
    if (in.get() != std::ifstream::traits_type::eof())
        throw std::invalid_argument("read_snapshot: trailing bytes");
    return snap;
}

}  // namespace mhd
