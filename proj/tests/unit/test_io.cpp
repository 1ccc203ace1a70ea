#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "classo/error.hpp"
#include "classo/io.hpp"
#include "oracle.hpp"

using namespace classo;

TEST(ParseCsv, HeaderDetectedAndSkipped) {
    const CsvTable t = parse_csv("y,a,b\n1,2,3\n4,5,6\n7,8,9\n");
    EXPECT_EQ(t.header, (std::vector<std::string>{"y", "a", "b"}));
    ASSERT_EQ(t.values.rows(), 3u);
    const RegressionTable r = to_regression(t);
    EXPECT_EQ(r.y, (Vector{1, 4, 7}));
    EXPECT_EQ(r.predictor_names, (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(r.predictors(2, 1), 9.0);
}

TEST(ParseCsv, NoHeaderDefaultsNames) {
    const CsvTable t = parse_csv("1, 2\n\n3,4e-1\r\n");
    EXPECT_TRUE(t.header.empty());
    const RegressionTable r = to_regression(t, 1);
    EXPECT_EQ(r.y, (Vector{2, 0.4}));
    EXPECT_EQ(r.response_name, "y");
    EXPECT_EQ(r.predictor_names, (std::vector<std::string>{"x1"}));
}

TEST(ParseCsv, NanCellReportsCoordinates) {
    try {
        parse_csv("y,x\n1,2\n3,NaN\n");
        FAIL() << "expected NonFiniteValue";
    } catch (const NonFiniteValue& e) {
        EXPECT_EQ(e.row(), 3u);
        EXPECT_EQ(e.col(), 2u);
    }
    EXPECT_THROW(parse_csv("1,inf\n"), NonFiniteValue);
}

TEST(ParseCsv, MalformedInput) {
    try {
        parse_csv("1,2\n3\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.row(), 2u);
    }
    try {
        parse_csv("1,2\n3,abc\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.row(), 2u);
        EXPECT_EQ(e.col(), 2u);
    }
    EXPECT_THROW(parse_csv("a,b\n"), ParseError);
    EXPECT_THROW(to_regression(parse_csv("1\n2\n")), ConfigError);
}

TEST(FormatCsv, RoundTripIsBitwise) {
    Matrix m = ref::gaussian_matrix(20, 4, 3);
    m(0, 0) = 1e-300;
    m(1, 1) = -123456789.123456789;
    m(2, 2) = 0.1;
    const CsvTable t = parse_csv(format_csv(m, {"a", "b", "c", "d"}));
    EXPECT_EQ(t.values, m);
    EXPECT_EQ(format_double(0.1), "0.1");
}

TEST(WriteFileAtomic, WritesAndLeavesNoTemporary) {
    const auto dir = std::filesystem::temp_directory_path() / "classo_io_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / "out.txt";
    write_file_atomic(path, "hello\n");
    std::ifstream in(path);
    std::string s;
    std::getline(in, s);
    EXPECT_EQ(s, "hello");
    EXPECT_FALSE(std::filesystem::exists(dir / "out.txt.tmp"));
    EXPECT_THROW(write_file_atomic(dir / "missing" / "x.txt", "x"), ConfigError);
    EXPECT_THROW(read_csv(dir / "absent.csv"), ConfigError);
    std::filesystem::remove_all(dir);
}

TEST(Preprocess, CenterAndScale) {
    Matrix m = Matrix::from_rows({{1, 5}, {3, 5}, {5, 5}});
    const Vector means = center_columns(m);
    EXPECT_EQ(means, (Vector{3, 5}));
    EXPECT_EQ(m.col(0)[0], -2.0);
    const Vector sd = scale_columns(m);
    EXPECT_DOUBLE_EQ(sd[0], 2.0);
    EXPECT_EQ(sd[1], 1.0);  // constant column left alone
    EXPECT_DOUBLE_EQ(m(2, 0), 1.0);
    Vector v{1, 2, 6};
    EXPECT_EQ(center_vector(v), 3.0);
    EXPECT_EQ(v, (Vector{-2, -1, 3}));
}
