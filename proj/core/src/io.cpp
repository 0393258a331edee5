#include "tiergrade/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace tiergrade::io {

std::string fmt12(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", x);
    return buf;
}

std::vector<Student> read_population(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw std::invalid_argument("population: empty file");
    // Tolerate a trailing CR from CRLF files.
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "id,theta")
        throw std::invalid_argument("population: expected header 'id,theta', got '" +
                                    line + "'");
    std::vector<Student> students;
    size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("population: missing comma on line " +
                                        std::to_string(lineno));
        const std::string id = line.substr(0, comma);
        const std::string value = line.substr(comma + 1);
        try {
            size_t consumed = 0;
            const double theta = std::stod(value, &consumed);
            if (consumed != value.size()) throw std::invalid_argument(value);
            students.push_back({id, theta});
        } catch (const std::exception&) {
            throw std::invalid_argument("population: bad theta '" + value +
                                        "' on line " + std::to_string(lineno));
        }
    }
    if (students.empty())
        throw std::invalid_argument("population: no students");
    return students;
}

std::vector<Student> read_population_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("population: cannot open '" + path + "'");
    return read_population(in);
}

std::string welfare_report_csv(const WelfareReport& report) {
    std::ostringstream out;
    out << "school,mass,mean_type,effort,contribution\n";
    for (size_t s = 0; s < report.per_school.size(); ++s) {
        const SchoolWelfare& w = report.per_school[s];
        out << s << ',' << fmt12(w.mass) << ',' << fmt12(w.mean_type) << ','
            << fmt12(w.effort) << ',' << fmt12(w.contribution) << '\n';
    }
    out << "# total=" << fmt12(report.total) << '\n';
    return out.str();
}

}  // namespace tiergrade::io
