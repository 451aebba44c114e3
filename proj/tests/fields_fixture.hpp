#ifndef BTQ_TESTS_FIELDS_FIXTURE_HPP
#define BTQ_TESTS_FIELDS_FIXTURE_HPP

#include <memory>

#include "btq/field.hpp"

// Hand-built fields used across the suites.

inline std::unique_ptr<btq::NumberField> make_Q() {
    using namespace btq;
    return NumberField::create("Q", ZPoly{0, 1}, QMat{{Rat(1)}}, Int(1), {QVec{Rat(0)}});
}

inline std::unique_ptr<btq::NumberField> make_Qsqrt5() {
    using namespace btq;
    // x^2 - x - 1, basis (1, phi)
    return NumberField::create("Q(sqrt5)", ZPoly{-1, -1, 1},
                               QMat{{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}, Int(5),
                               {QVec{Rat(0), Rat(1)}, QVec{Rat(1), Rat(-1)}});
}

inline std::unique_ptr<btq::NumberField> make_Qsqrt97() {
    using namespace btq;
    // x^2 - 97, basis (1, (1+theta)/2); 2 divides the index
    std::map<btq::Int, std::vector<std::pair<btq::QVec, std::pair<unsigned, unsigned>>>> idx;
    idx[Int(2)] = {{QVec{Rat(0), Rat(1)}, {1u, 1u}}, {QVec{Rat(-1), Rat(1)}, {1u, 1u}}};
    return NumberField::create("Q(sqrt97)", ZPoly{-97, 0, 1},
                               QMat{{Rat(1), Rat(0)}, {Rat(1, 2), Rat(1, 2)}}, Int(97),
                               {QVec{Rat(-1), Rat(2)}, QVec{Rat(1), Rat(-2)}}, idx);
}

inline std::unique_ptr<btq::NumberField> make_Qsqrt10() {
    using namespace btq;
    // x^2 - 10, basis (1, theta); class number 2
    return NumberField::create("Q(sqrt10)", ZPoly{-10, 0, 1},
                               QMat{{Rat(1), Rat(0)}, {Rat(0), Rat(1)}}, Int(40),
                               {QVec{Rat(0), Rat(1)}, QVec{Rat(0), Rat(-1)}});
}

#endif
