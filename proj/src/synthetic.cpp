#include "lprotector/synthetic.hpp"

#include "lprotector/support.hpp"

#include <array>
#include <cstdio>
#include <random>
#include <string>

namespace lprotector {

namespace {

constexpr std::array kNouns = {"packet", "buffer", "header", "record", "entry",  "frame", "token", "field",
                               "chunk",  "block",  "node",   "item",   "config", "label", "path",  "name",
                               "reply",  "query",  "cache",  "slot",   "page",   "cell",  "key",   "value"};
constexpr std::array kVerbs = {"parse", "load",  "read",   "handle", "decode", "copy", "build",
                               "fill",  "store", "update", "fetch",  "apply",  "scan", "merge"};
constexpr std::array kSizes = {"16", "32", "64", "128", "256", "512"};

class Namer {
public:
    explicit Namer(std::mt19937_64& rng) : rng_(rng) {}

    template <std::size_t N>
    const char* pick(const std::array<const char*, N>& words) {
        return words[uniform_below(rng_, N)];
    }

    std::string identifier() {
        return std::string(pick(kNouns)) + "_" + pick(kNouns) + std::to_string(uniform_below(rng_, 100));
    }
    std::string function_name() { return std::string(pick(kVerbs)) + "_" + pick(kNouns); }
    std::string size() { return pick(kSizes); }
    std::uint64_t below(std::uint64_t n) { return uniform_below(rng_, n); }

private:
    std::mt19937_64& rng_;
};

// Neutral statements shared by both classes.
std::string filler(Namer& n) {
    switch (n.below(6)) {
        case 0: {
            const auto v = n.identifier();
            return "    int " + v + " = 0;\n    " + v + " += " + std::to_string(n.below(9) + 1) + ";\n";
        }
        case 1: {
            const auto i = n.identifier();
            const auto total = n.identifier();
            return "    long " + total + " = 0;\n    for (int " + i + " = 0; " + i + " < " + n.size() + "; ++" + i +
                   ") {\n        " + total + " += " + i + ";\n    }\n";
        }
        case 2: return "    if (ctx == NULL) {\n        return -1;\n    }\n";
        case 3: return "    ctx->" + n.identifier() + " = " + std::to_string(n.below(100)) + ";\n";
        case 4: return "    log_debug(\"" + n.function_name() + "\");\n";
        default: return "    unsigned " + n.identifier() + " = ctx->flags & 0x" + std::to_string(n.below(90) + 10) + ";\n";
    }
}

struct Idiom {
    const char* cwe;
    const char* name;
    const char* description;
};

constexpr std::array<Idiom, 6> kIdioms = {{
    {"CWE-120", "Buffer Copy without Checking Size of Input", "Unbounded strcpy into a fixed-size stack buffer."},
    {"CWE-134", "Use of Externally-Controlled Format String", "User data passed as a printf format string."},
    {"CWE-119", "Improper Restriction of Operations within the Bounds of a Memory Buffer",
     "memcpy length taken from the input without a bounds check."},
    {"CWE-416", "Use After Free", "Object dereferenced after it has been freed."},
    {"CWE-78", "OS Command Injection", "Shell command assembled from user input with sprintf and run by system."},
    {"CWE-190", "Integer Overflow or Wraparound", "Allocation size computed by an unchecked multiplication."},
}};

// Idioms keep fixed local names so each one has a stable fingerprint.
std::string vulnerable_body(std::size_t idiom, Namer& n) {
    const std::string buf = "local_buf";
    const auto size = n.size();
    switch (idiom) {
        case 0:
            return "    char " + buf + "[" + size + "];\n    strcpy(" + buf + ", input);\n    strcat(" + buf +
                   ", input);\n    gets(" + buf + ");\n";
        case 1:
            return "    printf(input);\n    fprintf(stderr, input);\n    syslog(LOG_INFO, input);\n";
        case 2:
            return "    char " + buf + "[" + size + "];\n    size_t len = *(const size_t *)input;\n    memcpy(" + buf +
                   ", input + sizeof(size_t), len);\n    memmove(" + buf + ", input, len);\n";
        case 3:
            return "    struct session *sess = ctx->sess;\n    free(sess);\n    sess->refcount--;\n    free(sess);\n";
        case 4:
            return "    char cmd[" + size + "];\n    sprintf(cmd, \"convert %s out.png\", input);\n    system(cmd);\n"
                   "    popen(cmd, \"r\");\n";
        default:
            return "    size_t count = *(const unsigned *)input;\n    char *" + buf +
                   " = malloc(count * sizeof(struct record));\n    for (size_t i = 0; i <= count; i++) {\n        " +
                   buf + "[i * sizeof(struct record)] = input[i];\n    }\n";
    }
}

std::string clean_body(Namer& n) {
    const auto a = n.identifier();
    const auto b = n.identifier();
    switch (n.below(5)) {
        case 0:
            return "    int " + a + " = ctx->count;\n    int " + b + " = ctx->limit;\n    return " + a + " < " + b +
                   " ? " + a + " : " + b + ";\n";
        case 1:
            return "    struct node *cur = ctx->head;\n    while (cur != NULL) {\n        cur->visited = 1;\n"
                   "        cur = cur->next;\n    }\n";
        case 2:
            return "    double " + a + " = ctx->scale * 0.5;\n    ctx->ratio = " + a + " / (ctx->total + 1.0);\n";
        case 3:
            return "    switch (ctx->state) {\n    case STATE_IDLE:\n        ctx->state = STATE_RUN;\n        break;\n"
                   "    default:\n        break;\n    }\n";
        default:
            return "    ctx->" + a + " = ctx->" + b + " << 1;\n    ctx->checksum ^= ctx->" + a + ";\n";
    }
}

std::string make_function(const std::string& body, Namer& n) {
    std::string out = "static int " + n.function_name() + "(struct context *ctx, const char *input)\n{\n";
    const auto before = n.below(3);
    for (std::uint64_t i = 0; i < before; ++i) out += filler(n);
    out += body;
    const auto after = n.below(2);
    for (std::uint64_t i = 0; i < after; ++i) out += filler(n);
    out += "    return 0;\n}\n";
    return out;
}

std::string padded(std::size_t i) {
    char buffer[24];
    std::snprintf(buffer, sizeof(buffer), "%04zu", i);
    return buffer;
}

std::string csv_field(const std::string& value) {
    std::string out = "\"";
    for (char c : value) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::vector<CodeSample> make_planted_corpus(std::size_t n_vulnerable, std::size_t n_clean, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    Namer namer(rng);
    std::vector<CodeSample> samples;
    samples.reserve(n_vulnerable + n_clean);
    for (std::size_t i = 0; i < n_vulnerable; ++i) {
        const auto idiom = i % kIdioms.size();
        CodeSample s;
        s.id = "vul-" + padded(i);
        s.label = 1;
        s.code = make_function(vulnerable_body(idiom, namer), namer);
        s.cwe_id = kIdioms[idiom].cwe;
        s.vuln_name = kIdioms[idiom].name;
        s.description = kIdioms[idiom].description;
        samples.push_back(std::move(s));
    }
    for (std::size_t i = 0; i < n_clean; ++i) {
        CodeSample s;
        s.id = "clean-" + padded(i);
        s.label = 0;
        s.code = make_function(clean_body(namer), namer);
        samples.push_back(std::move(s));
    }
    return samples;
}

void write_corpus_csv(std::span<const CodeSample> samples, const std::filesystem::path& path) {
    const ColumnMap columns;
    std::string out = "id," + columns.code + "," + columns.label + "," + csv_field(*columns.cwe_id) + "," +
                      csv_field(*columns.vuln_name) + "," + *columns.description + "\n";
    for (const auto& s : samples) {
        out += csv_field(s.id) + "," + csv_field(s.code) + "," + std::to_string(s.label) + "," +
               csv_field(s.cwe_id.value_or("")) + "," + csv_field(s.vuln_name.value_or("")) + "," +
               csv_field(s.description.value_or("")) + "\n";
    }
    write_file(path, out);
}

}  // namespace lprotector
