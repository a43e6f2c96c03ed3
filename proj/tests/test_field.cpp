#include "ffext/field.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ffext/errors.hpp"

namespace ffext {
namespace {

FieldPtr make_q(int q) {
  switch (q) {
    case 9:  return FieldContext::make(3, 2);
    case 25: return FieldContext::make(5, 2);
    case 27: return FieldContext::make(3, 3);
    default: return FieldContext::make(q, 1);
  }
}

TEST(Field, FrozenSmallValues) {
  auto f3 = FieldContext::make(3);
  EXPECT_EQ(f3->add(1, 2), 0);
  EXPECT_EQ(f3->neg(1), 2);

  auto f7 = FieldContext::make(7);
  EXPECT_EQ(f7->inv(3), 5);
  EXPECT_EQ(f7->mul(3, 5), 1);

  // In F_9 with modulus t^2 + 1 the element t has index 3 and t * t = -1.
  auto f9 = FieldContext::make(3, 2);
  EXPECT_EQ(f9->modulus(), (std::vector<int>{1, 0, 1}));
  EXPECT_EQ(f9->mul(3, 3), 2);
  EXPECT_EQ(f9->trace(3), 0);
  EXPECT_NEAR(std::abs(f9->additive_character(3) - cplx(1.0, 0.0)), 0.0, 1e-12);
}

TEST(Field, QuadraticCharacterFrozen) {
  auto f7 = FieldContext::make(7);
  EXPECT_EQ(f7->quadratic_character(0), 0);
  EXPECT_EQ(f7->quadratic_character(2), 1);
  EXPECT_EQ(f7->quadratic_character(3), -1);
}

TEST(Field, MinusOneSquare) {
  EXPECT_TRUE(make_q(5)->is_minus_one_square());
  EXPECT_FALSE(make_q(7)->is_minus_one_square());
  EXPECT_TRUE(make_q(9)->is_minus_one_square());
  EXPECT_FALSE(make_q(3)->is_minus_one_square());
  EXPECT_TRUE(make_q(13)->is_minus_one_square());
  EXPECT_FALSE(make_q(11)->is_minus_one_square());
}

TEST(Field, GaussSumFrozen) {
  auto f5 = FieldContext::make(5);
  EXPECT_NEAR(f5->gauss_sum().real(), std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(f5->gauss_sum().imag(), 0.0, 1e-12);

  auto f3 = FieldContext::make(3);
  EXPECT_NEAR(f3->gauss_sum().real(), 0.0, 1e-12);
  EXPECT_NEAR(f3->gauss_sum().imag(), std::sqrt(3.0), 1e-12);
}

TEST(Field, GaussSumMagnitude) {
  for (int q : {3, 5, 7, 9, 11, 13, 25, 27}) {
    auto f = make_q(q);
    EXPECT_NEAR(std::norm(f->gauss_sum()), static_cast<double>(q), 1e-9)
        << "q=" << q;
  }
}

TEST(Field, AxiomsExhaustive) {
  for (int q : {3, 5, 7, 9, 25, 27}) {
    auto f = make_q(q);
    ASSERT_EQ(f->q(), q);
    for (int a = 0; a < q; ++a) {
      EXPECT_EQ(f->add(a, 0), a);
      EXPECT_EQ(f->mul(a, 1), a);
      EXPECT_EQ(f->add(a, f->neg(a)), 0);
      if (a != 0) EXPECT_EQ(f->mul(a, f->inv(a)), 1);
      for (int b = 0; b < q; ++b) {
        EXPECT_EQ(f->add(a, b), f->add(b, a));
        EXPECT_EQ(f->mul(a, b), f->mul(b, a));
        for (int c = 0; c < q; ++c) {
          EXPECT_EQ(f->add(f->add(a, b), c), f->add(a, f->add(b, c)));
          EXPECT_EQ(f->mul(f->mul(a, b), c), f->mul(a, f->mul(b, c)));
          EXPECT_EQ(f->mul(a, f->add(b, c)), f->add(f->mul(a, b), f->mul(a, c)));
        }
      }
    }
  }
}

TEST(Field, CharacterOrthogonality) {
  for (int q : {3, 5, 7, 9, 25, 27}) {
    auto f = make_q(q);
    for (int a = 0; a < q; ++a) {
      cplx sum = 0.0;
      for (int x = 0; x < q; ++x) sum += f->additive_character(f->mul(a, x));
      const cplx expect = (a == 0) ? cplx(q, 0.0) : cplx(0.0, 0.0);
      EXPECT_NEAR(std::abs(sum - expect), 0.0, 1e-9) << "q=" << q << " a=" << a;
    }
  }
}

TEST(Field, CharacterHomomorphism) {
  for (int q : {7, 9, 27}) {
    auto f = make_q(q);
    for (int a = 0; a < q; ++a)
      for (int b = 0; b < q; ++b)
        EXPECT_NEAR(std::abs(f->additive_character(f->add(a, b)) -
                             f->additive_character(a) * f->additive_character(b)),
                    0.0, 1e-12);
  }
}

TEST(Field, QuadraticCharacterAgainstSquares) {
  for (int q : {3, 5, 7, 9, 25, 27}) {
    auto f = make_q(q);
    std::vector<bool> is_square(q, false);
    for (int b = 1; b < q; ++b) is_square[f->mul(b, b)] = true;
    for (int a = 1; a < q; ++a)
      EXPECT_EQ(f->quadratic_character(a), is_square[a] ? 1 : -1)
          << "q=" << q << " a=" << a;
    for (int a = 1; a < q; ++a)
      for (int b = 1; b < q; ++b)
        EXPECT_EQ(f->quadratic_character(f->mul(a, b)),
                  f->quadratic_character(a) * f->quadratic_character(b));
  }
}

TEST(Field, TraceAdditiveToPrimeField) {
  for (int q : {9, 25, 27}) {
    auto f = make_q(q);
    for (int a = 0; a < q; ++a) {
      ASSERT_LT(f->trace(a), f->p());
      for (int b = 0; b < q; ++b)
        EXPECT_EQ(f->trace(f->add(a, b)), (f->trace(a) + f->trace(b)) % f->p());
    }
  }
}

TEST(Field, PowAndFromInt) {
  auto f = make_q(27);
  for (int a = 1; a < f->q(); ++a) {
    EXPECT_EQ(f->pow(a, f->q() - 1), 1);
    EXPECT_EQ(f->pow(a, -1), f->inv(a));
  }
  EXPECT_EQ(f->from_int(-1), f->neg(1));
  EXPECT_EQ(f->from_int(5), 2);
  EXPECT_EQ(f->from_int(0), 0);
}

TEST(Field, SameField) {
  auto a = FieldContext::make(3, 2);
  auto b = FieldContext::make(3, 2, {1, 0, 1});
  auto c = FieldContext::make(3, 2, {2, 2, 1});
  EXPECT_TRUE(a->same_field(*b));
  EXPECT_FALSE(a->same_field(*c));
  EXPECT_FALSE(a->same_field(*FieldContext::make(3)));
}

TEST(Field, Errors) {
  EXPECT_THROW(FieldContext::make(2), std::invalid_argument);
  EXPECT_THROW(FieldContext::make(4), std::invalid_argument);
  EXPECT_THROW(FieldContext::make(9), std::invalid_argument);
  EXPECT_THROW(FieldContext::make(3, 0), std::invalid_argument);
  EXPECT_THROW(FieldContext::make(3, 7), resource_error);
  EXPECT_THROW(FieldContext::make(3, 2, {2, 0, 1}), std::invalid_argument);
  EXPECT_THROW(FieldContext::make(3, 2, {1, 0}), std::invalid_argument);
  EXPECT_THROW(FieldContext::make(3, 2, {1, 0, 2}), std::invalid_argument);
  EXPECT_THROW(FieldContext::make(3, 1, {1, 1}), std::invalid_argument);
  EXPECT_THROW(FieldContext::make(3)->inv(0), std::domain_error);
}

}  // namespace
}  // namespace ffext
