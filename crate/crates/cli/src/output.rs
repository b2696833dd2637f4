use serde::{Deserialize, Serialize};

/// One computed constant, as printed with `--json`. Numbers that carry
/// precision travel as strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub base: u32,
    pub alpha: u32,
    pub beta: u32,
    pub pattern: String,
    pub which: String,
    pub digits: u32,
    pub value: String,
    pub error_bound: String,
    #[serde(rename = "M_used")]
    pub m_used: usize,
    pub precision_used: u32,
    pub precision_bits: u32,
    pub wall_time_ms: u128,
}

/// Splits the fractional part into blocks of five digits.
pub fn group_digits(text: &str) -> String {
    let Some((int, frac)) = text.split_once('.') else {
        return text.to_string();
    };
    let blocks: Vec<&str> = frac
        .as_bytes()
        .chunks(5)
        .map(|c| std::str::from_utf8(c).expect("ascii digits"))
        .collect();
    format!("{int}.{}", blocks.join(" "))
}

/// A JSON array of arbitrarily large integers.
pub fn integer_array(values: &[String]) -> String {
    format!("[{}]", values.join(","))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grouping() {
        assert_eq!(group_digits("230.258821321433508"), "230.25882 13214 33508");
        assert_eq!(group_digits("2.7633"), "2.7633");
        assert_eq!(group_digits("12"), "12");
        assert_eq!(group_digits("-0.123456"), "-0.12345 6");
    }

    #[test]
    fn record_round_trips() {
        let r = OutputRecord {
            base: 10,
            alpha: 4,
            beta: 2,
            pattern: "42".into(),
            which: "K1".into(),
            digits: 20,
            value: "230.25882132143350840478".into(),
            error_bound: "1.2e-25".into(),
            m_used: 25,
            precision_used: 42,
            precision_bits: 144,
            wall_time_ms: 3,
        };
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"M_used\":25"));
        assert_eq!(serde_json::from_str::<OutputRecord>(&text).unwrap(), r);
    }
}
