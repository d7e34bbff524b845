const HEADER: &str = include_str!("../include/k3gw.h");

#[test]
fn header_declares_every_export() {
    for sym in [
        "k3gw_engine_new",
        "k3gw_engine_free",
        "k3gw_engine_memo_len",
        "k3gw_invariant",
        "k3gw_kernel",
        "k3gw_fit",
        "k3gw_virasoro",
        "k3gw_string_free",
        "k3gw_last_error",
        "k3gw_version",
    ] {
        assert!(HEADER.contains(&format!("{sym}(")), "{sym} missing from header");
    }
    assert!(HEADER.contains("typedef struct K3gwEngine K3gwEngine;"));
    assert!(HEADER.contains("K3GW_STATUS_RANK_BUDGET = 4"));
}
