//! Embedded datasets.

use crate::table::Table;

/// Warp breaks per loom, rows ordered wool A then B, tension L, M, H within wool.
const WARPBREAKS_BREAKS: [u32; 54] = [
    26, 30, 54, 25, 70, 52, 51, 26, 67, 18, 21, 29, 17, 12, 18, 35, 30, 36, 36, 21, 24, 18, 10,
    43, 28, 15, 26, 27, 14, 29, 19, 29, 31, 41, 20, 44, 42, 26, 19, 16, 39, 28, 21, 39, 29, 20,
    21, 24, 17, 13, 15, 15, 16, 28,
];

fn warpbreaks_rows() -> impl Iterator<Item = (u32, &'static str, &'static str)> {
    WARPBREAKS_BREAKS.iter().enumerate().map(|(i, &b)| {
        let wool = if i < 27 { "A" } else { "B" };
        let tension = ["L", "M", "H"][(i % 27) / 9];
        (b, wool, tension)
    })
}

/// The warpbreaks table with columns `breaks`, `wool`, `tension`.
pub fn warpbreaks() -> Table {
    let (breaks, (wool, tension)): (Vec<f64>, (Vec<&str>, Vec<&str>)) = warpbreaks_rows()
        .map(|(b, w, t)| (f64::from(b), (w, t)))
        .unzip();
    Table::new()
        .with_numeric("breaks", breaks)
        .and_then(|t| t.with_categorical("wool", &wool))
        .and_then(|t| t.with_categorical("tension", &tension))
        .expect("embedded dataset is rectangular")
}

/// The same data as headered CSV.
pub fn warpbreaks_csv() -> String {
    let mut out = String::from("breaks,wool,tension\n");
    for (b, w, t) in warpbreaks_rows() {
        out.push_str(&format!("{b},{w},{t}\n"));
    }
    out
}
