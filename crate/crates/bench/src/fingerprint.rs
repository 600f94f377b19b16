use std::fs;

/// CPU model and core count, written as `#` comment lines on timing output.
pub fn environment_fingerprint() -> Vec<String> {
    let cpu = fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|text| {
            text.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split_once(':'))
                .map(|(_, v)| v.trim().to_string())
        })
        .unwrap_or_else(|| "unknown".to_string());
    let cores = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    vec![
        format!("cpu: {cpu}"),
        format!("cores: {cores}"),
        format!("os: {}-{}", std::env::consts::OS, std::env::consts::ARCH),
    ]
}
