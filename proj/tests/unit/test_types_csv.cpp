#include <gtest/gtest.h>

#include <sstream>

#include "fixtures.hpp"
#include "ovi/csv.hpp"
#include "ovi/error.hpp"

using namespace ovi;

namespace {

std::string intraday_row(int slot, std::int64_t vol, const char* mpc = "CUST", const char* intent = "OPEN") {
    return "2020-01-06," + std::to_string(slot) + ",ABC,C,100,2020-02-21," + mpc + ",BUY," + intent + "," +
           std::to_string(vol) + ",1\n";
}

}  // namespace

TEST(Date, IsoRoundTrip) {
    const Date d = Date::from_ymd(2016, 2, 29);
    EXPECT_EQ(d.iso(), "2016-02-29");
    EXPECT_EQ(Date::parse("2016-02-29"), d);
    EXPECT_EQ(Date::from_ymd(1970, 1, 1).days_since_epoch(), 0);
    EXPECT_EQ(Date::from_ymd(2000, 3, 1) - Date::from_ymd(2000, 2, 28), 2);
}

TEST(Date, RejectsMalformed) {
    EXPECT_FALSE(Date::parse("2016-2-29"));
    EXPECT_FALSE(Date::parse("2015-02-29"));
    EXPECT_FALSE(Date::parse("2016-13-01"));
    EXPECT_FALSE(Date::parse("20160101"));
}

TEST(Codes, MpcRoundTrip) {
    for (Mpc m : kAllMpcs) {
        EXPECT_EQ(mpc_from_code(to_code(m)), m);
        EXPECT_EQ(mpc_from_name(to_name(m)), m);
    }
    EXPECT_FALSE(mpc_from_code("XX"));
}

TEST(ParseIntraday, SingleRow) {
    std::istringstream in(std::string(kIntradayHeader) + "\n" + intraday_row(1, 10));
    const auto rows = parse_intraday(in);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].slot, 1);
    EXPECT_EQ(rows[0].cum_volume, 10);
    EXPECT_EQ(rows[0].contract.underlying, "ABC");
    EXPECT_EQ(rows[0].contract.option_side, OptionSide::Call);
    EXPECT_EQ(rows[0].mpc, Mpc::Customer);
    EXPECT_EQ(rows[0].exchange, "PHLX");
}

TEST(ParseIntraday, CumulativeDecreaseIsValidationError) {
    std::istringstream in(std::string(kIntradayHeader) + "\n" + intraday_row(1, 10) + intraday_row(2, 8));
    try {
        parse_intraday(in);
        FAIL() << "expected ValidationError";
    } catch (const ValidationError& e) {
        EXPECT_NE(std::string(e.what()).find("ABC"), std::string::npos);
    }
}

TEST(ParseIntraday, CorrectionsAllowedWhenRequested) {
    std::istringstream in(std::string(kIntradayHeader) + "\n" + intraday_row(1, 10) + intraday_row(2, 8));
    IntradayCsvSchema schema;
    schema.allow_corrections = true;
    EXPECT_EQ(parse_intraday(in, schema).size(), 2u);
}

TEST(ParseIntraday, FullDayMatchesHandBuiltCollection) {
    std::string text(kIntradayHeader);
    text += "\n";
    std::vector<VolumeBucket> expected;
    for (int s = 1; s <= kSlotsPerDay; ++s) {
        text += intraday_row(s, 5 * s);
        VolumeBucket b;
        b.day = Date::from_ymd(2020, 1, 6);
        b.slot = s;
        b.contract = ContractKey{"ABC", OptionSide::Call, 100.0, Date::from_ymd(2020, 2, 21)};
        b.mpc = Mpc::Customer;
        b.trade_side = TradeSide::Buy;
        b.intent = Intent::Open;
        b.cum_volume = 5 * s;
        b.cum_trades = 1;
        b.exchange = "PHLX";
        expected.push_back(b);
    }
    std::istringstream in(text);
    const auto rows = parse_intraday(in);
    EXPECT_EQ(rows, expected);
    EXPECT_EQ(rows.back().cum_volume, 5 * kSlotsPerDay);
}

TEST(ParseIntraday, MalformedRowReportsLine) {
    std::istringstream in(std::string(kIntradayHeader) + "\n" + intraday_row(1, 10) +
                          "2020-01-06,40,ABC,C,100,2020-02-21,CUST,BUY,OPEN,1,1\n");
    try {
        parse_intraday(in);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(ParseIntraday, HeaderAndIntentChecks) {
    std::istringstream bad_header("date,slot\n");
    EXPECT_THROW(parse_intraday(bad_header), ParseError);
    std::istringstream mm_with_intent(std::string(kIntradayHeader) + "\n" + intraday_row(1, 1, "MM", "OPEN"));
    EXPECT_THROW(parse_intraday(mm_with_intent), ParseError);
    std::istringstream cust_na(std::string(kIntradayHeader) + "\n" + intraday_row(1, 1, "CUST", "NA"));
    EXPECT_THROW(parse_intraday(cust_na), ParseError);
}

TEST(ParseDailySummary, AcceptsOrderedOhlc) {
    std::istringstream in(std::string(kDailyHeader) + "\n2020-01-06,ABC,C,100,2020-02-21,2,3,1,4,100,7\n");
    const auto rows = parse_daily_summary(in);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_DOUBLE_EQ(rows[0].mid_px(), 2.5);
    EXPECT_EQ(rows[0].open_interest, 100);
}

TEST(ParseDailySummary, RejectsBadOhlcAndNegativeOi) {
    std::istringstream low_high(std::string(kDailyHeader) + "\n2020-01-06,ABC,C,100,2020-02-21,4.5,4.5,5,4,100,7\n");
    EXPECT_THROW(parse_daily_summary(low_high), ValidationError);
    std::istringstream neg_oi(std::string(kDailyHeader) + "\n2020-01-06,ABC,C,100,2020-02-21,2,3,1,4,-1,7\n");
    EXPECT_THROW(parse_daily_summary(neg_oi), ValidationError);
}

TEST(ParseDailySummary, ThreeContractRoundTrip) {
    std::vector<DailyOptionSummary> rows;
    for (int k = 0; k < 3; ++k) {
        DailyOptionSummary s;
        s.day = Date::from_ymd(2020, 1, 6);
        s.contract = ContractKey{"ABC", k == 1 ? OptionSide::Put : OptionSide::Call, 95.0 + 5.0 * k,
                                 Date::from_ymd(2020, 2, 21)};
        s.open_px = 1.25 + k;
        s.close_px = 1.5 + k;
        s.low_px = 1.0 + k;
        s.high_px = 2.0 + k;
        s.open_interest = 10 * k;
        s.total_volume = 3 * k;
        rows.push_back(s);
    }
    std::ostringstream out;
    write_daily_summary(out, rows);
    std::istringstream in(out.str());
    EXPECT_EQ(parse_daily_summary(in), rows);
}

TEST(ParseEquityBars, AcceptsAndRejects) {
    std::istringstream ok(std::string(kEquityHeader) + "\n2020-01-06,ABC,100,101\n");
    EXPECT_EQ(parse_equity_bars(ok).size(), 1u);
    std::istringstream dup(std::string(kEquityHeader) + "\n2020-01-06,ABC,100,101\n2020-01-06,ABC,100,102\n");
    EXPECT_THROW(parse_equity_bars(dup), ValidationError);
    std::istringstream zero(std::string(kEquityHeader) + "\n2020-01-06,ABC,0,101\n");
    EXPECT_THROW(parse_equity_bars(zero), ValidationError);
}

TEST(ParseEquityBars, TwoAssetsFiveDays) {
    std::string text(kEquityHeader);
    text += "\n";
    for (const char* a : {"AAA", "BBB"}) {
        for (int d = 0; d < 5; ++d) text += ovi::testing::day(d).iso() + "," + a + ",10,11\n";
    }
    std::istringstream in(text);
    EXPECT_EQ(parse_equity_bars(in).size(), 10u);
}

TEST(ParseIntraday, WriteParseRoundTrip) {
    std::vector<VolumeBucket> rows;
    for (int s = 1; s <= 3; ++s) {
        VolumeBucket b;
        b.day = Date::from_ymd(2020, 1, 6);
        b.slot = s;
        b.contract = ContractKey{"XYZ", OptionSide::Put, 42.5, Date::from_ymd(2020, 3, 20)};
        b.mpc = Mpc::MarketMaker;
        b.trade_side = TradeSide::Sell;
        b.intent = Intent::Unspecified;
        b.cum_volume = 7 * s;
        b.cum_trades = s;
        b.exchange = "PHLX";
        rows.push_back(b);
    }
    std::ostringstream out;
    write_intraday(out, rows);
    std::istringstream in(out.str());
    EXPECT_EQ(parse_intraday(in), rows);
}

TEST(FormatDouble, ShortestRoundTrip) {
    for (double x : {0.1, 1.0 / 3.0, 1e-300, 123456.789, -2.5}) {
        EXPECT_EQ(std::stod(format_double(x)), x);
    }
    EXPECT_EQ(format_double(0.5), "0.5");
}

TEST(Dataset, SaveLoadRoundTrip) {
    ovi::testing::MiniMarket m({"AAA", "BBB"}, 3);
    const auto c = m.contract("AAA", OptionSide::Call);
    const auto p = m.contract("BBB", OptionSide::Put, 50.0);
    m.flow(0, c, Mpc::Customer, TradeSide::Buy, 10);
    m.flow(1, p, Mpc::MarketMaker, TradeSide::Sell, 4, Intent::Unspecified, 12);
    m.flow(1, p, Mpc::Firm, TradeSide::Buy, 3, Intent::Close, 5, "CBOE");
    const auto data = std::move(m).build();
    const auto dir = ovi::testing::temp_dir("roundtrip");
    save_dataset(data, dir);
    EXPECT_TRUE(std::filesystem::exists(dir / "intraday_PHLX.csv"));
    EXPECT_TRUE(std::filesystem::exists(dir / "intraday_CBOE.csv"));
    const auto back = load_dataset(dir);
    EXPECT_EQ(back.buckets(), data.buckets());
    EXPECT_EQ(back.daily_summaries(), data.daily_summaries());
    EXPECT_EQ(back.equity_bars(), data.equity_bars());
    EXPECT_EQ(back.assets(), data.assets());
}
