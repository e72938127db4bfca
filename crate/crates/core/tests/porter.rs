use grievlex::textprep::stem;

#[test]
fn matches_reference_vectors() {
    let mut mismatches = Vec::new();
    let mut n = 0;
    for line in include_str!("data/porter_vectors.tsv").lines() {
        let (word, expected) = line.split_once('\t').unwrap();
        n += 1;
        let got = stem(word);
        if got != expected {
            mismatches.push(format!("{word}: got {got}, expected {expected}"));
        }
    }
    assert!(n > 1800);
    assert!(
        mismatches.is_empty(),
        "{} mismatches:\n{}",
        mismatches.len(),
        mismatches.join("\n")
    );
}

/// Words whose reference stem is a fixed point of the algorithm.
#[test]
fn stems_of_listed_words_are_fixed_points() {
    for word in include_str!("data/porter_idempotent.txt").lines() {
        let once = stem(word);
        assert_eq!(stem(&once), once, "{word}");
    }
}

#[test]
fn known_non_fixed_point() {
    // step 1b adds an 'e' the second pass strips again
    assert_eq!(stem("agreed"), "agre");
    assert_eq!(stem("agre"), "agr");
}
