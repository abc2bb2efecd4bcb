//! Every example runs to completion.

mod parse_and_print {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/parse_and_print.rs"));

    #[test]
    fn runs() {
        run_example().unwrap();
    }
}

mod check_database {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/check_database.rs"));

    #[test]
    fn runs() {
        run_example().unwrap();
    }
}

mod bounded_entailment {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/bounded_entailment.rs"));

    #[test]
    fn runs() {
        run_example().unwrap();
    }
}

mod structural_updates {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/structural_updates.rs"));

    #[test]
    fn runs() {
        run_example().unwrap();
    }
}

mod information_measures {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/information_measures.rs"));

    #[test]
    fn runs() {
        run_example().unwrap();
    }
}

mod plan_update {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/plan_update.rs"));

    #[test]
    fn runs() {
        run_example().unwrap();
    }
}

mod rank_deductions {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rank_deductions.rs"));

    #[test]
    fn runs() {
        run_example().unwrap();
    }
}

mod golden_values {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/golden_values.rs"));

    #[test]
    fn runs() {
        run_example().unwrap();
    }
}
