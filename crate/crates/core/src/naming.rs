use std::collections::HashMap;

/// Makes names unique by suffixing later duplicates with `#2`, `#3`, ...
pub(crate) fn disambiguate(names: Vec<String>) -> Vec<String> {
    let mut seen: HashMap<String, usize> = HashMap::new();
    for n in &names {
        *seen.entry(n.clone()).or_default() += 1;
    }
    if seen.values().all(|&c| c == 1) {
        return names;
    }
    let mut taken: std::collections::HashSet<String> = names.iter().cloned().collect();
    let mut count: HashMap<String, usize> = HashMap::new();
    names
        .into_iter()
        .map(|n| {
            let c = count.entry(n.clone()).or_default();
            *c += 1;
            if *c == 1 {
                return n;
            }
            let mut k = *c;
            loop {
                let cand = format!("{n}#{k}");
                if taken.insert(cand.clone()) {
                    return cand;
                }
                k += 1;
            }
        })
        .collect()
}
