//! Printed tables and equations bundled as JSON.

use serde_json::Value;

pub const DETERMINING: &str = include_str!("../paper-data/determining.json");
pub const TABLE1: &str = include_str!("../paper-data/table1.json");
pub const TABLE2: &str = include_str!("../paper-data/table2.json");
pub const TABLE3: &str = include_str!("../paper-data/table3.json");
pub const TABLE4: &str = include_str!("../paper-data/table4.json");
pub const TABLE5: &str = include_str!("../paper-data/table5.json");
pub const OPTIMAL: &str = include_str!("../paper-data/optimal.json");
pub const ZLIST: &str = include_str!("../paper-data/zlist.json");
pub const REDUCTIONS: &str = include_str!("../paper-data/reductions.json");

/// A bundled document by name.
pub fn document(name: &str) -> Option<Value> {
    let text = match name {
        "determining" => DETERMINING,
        "table1" => TABLE1,
        "table2" => TABLE2,
        "table3" => TABLE3,
        "table4" => TABLE4,
        "table5" => TABLE5,
        "optimal" => OPTIMAL,
        "zlist" => ZLIST,
        "reductions" => REDUCTIONS,
        _ => return None,
    };
    Some(serde_json::from_str(text).expect("bundled data is valid JSON"))
}
