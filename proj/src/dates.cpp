#include "lining/dates.hpp"

#include <cstdio>

#include "lining/errors.hpp"

namespace lining {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
    static const int table[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y))
        return 29;
    return table[m - 1];
}

bool parse_date(const std::string& iso, int& y, int& m, int& d) {
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-')
        return false;
    for (int i : {0, 1, 2, 3, 5, 6, 8, 9})
        if (iso[i] < '0' || iso[i] > '9')
            return false;
    y = std::stoi(iso.substr(0, 4));
    m = std::stoi(iso.substr(5, 2));
    d = std::stoi(iso.substr(8, 2));
    return m >= 1 && m <= 12 && d >= 1 && d <= days_in_month(y, m);
}

} // namespace

bool is_valid_date(const std::string& iso) {
    int y, m, d;
    return parse_date(iso, y, m, d);
}

std::string add_days(const std::string& iso, int days) {
    int y, m, d;
    if (!parse_date(iso, y, m, d))
        throw DataError("invalid ISO date '" + iso + "'");
    if (days < 0)
        throw DataError("add_days: negative offsets are not supported");
    while (days-- > 0) {
        if (++d > days_in_month(y, m)) {
            d = 1;
            if (++m > 12) {
                m = 1;
                ++y;
            }
        }
    }
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", y, m, d);
    return buf;
}

} // namespace lining
