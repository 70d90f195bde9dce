import io

import pytest
from hypothesis import given, strategies as st

from lscd.corpus import (
    Period,
    TargetEntry,
    TargetLexicon,
    index_usages,
    read_conllu,
)
from lscd.profiles import (
    SYNTAX_CATEGORY,
    CategoryVector,
    GrammaticalProfile,
    ProfileKind,
    build_profile,
    build_profiles,
    category_distance,
    dump_profile,
    profile_from_json_dict,
    profile_to_json_dict,
    score_profiles,
)


def make_profile(lemma, period, morph, synt, n_usages):
    return GrammaticalProfile(
        lemma=lemma,
        period=period,
        morph=[CategoryVector(cat, dict(counts)) for cat, counts in morph.items()],
        synt=CategoryVector(SYNTAX_CATEGORY, dict(synt)),
        n_usages=n_usages,
    )


def verb_corpus(past, pres, deprel="root"):
    """A synthetic stream of verb tokens: `past` with Tense=Past and `pres`
    with Tense=Pres, every one carrying VerbForm=Fin and the given deprel."""
    lines = []
    for index in range(past + pres):
        tense = "Past" if index < past else "Pres"
        lines.append(
            f"1\tworked\twork\tVERB\t_\tTense={tense}|VerbForm=Fin\t0\t{deprel}\t_\t_"
        )
        lines.append("")
    return list(read_conllu(io.StringIO("\n".join(lines))))


class TestBuildProfile:
    def test_tense_counts_match_usage_split(self):
        corpus = verb_corpus(past=42, pres=51)
        lexicon = TargetLexicon([TargetEntry("work")])
        index = index_usages(corpus, lexicon, Period.T1)
        profile = build_profile(corpus, index, "work", Period.T1)
        assert profile.n_usages == 93
        tense = profile.morph_by_category()["Tense"]
        assert tense.counts == {"Past": 42, "Pres": 51}
        assert profile.synt.counts == {"root": 93}

    def test_inconsistent_category_counts_rejected(self):
        # 93 usages cannot yield 102 VerbForm observations: one value per
        # category per token.
        with pytest.raises(ValueError, match="VerbForm"):
            make_profile(
                "work", Period.T1,
                morph={"Tense": {"Past": 42, "Pres": 51},
                       "VerbForm": {"Part": 68, "Fin": 25, "Inf": 9}},
                synt={"root": 93},
                n_usages=93,
            )

    def test_synt_counts_must_equal_usages(self):
        with pytest.raises(ValueError, match="syntactic"):
            make_profile("work", Period.T1, morph={}, synt={"root": 5}, n_usages=6)

    def test_zero_occurrences_empty_profile(self):
        corpus = verb_corpus(past=3, pres=0)
        lexicon = TargetLexicon([TargetEntry("sleep")])
        index = index_usages(corpus, lexicon, Period.T2)
        profile = build_profile(corpus, index, "sleep", Period.T2)
        assert profile.n_usages == 0
        assert profile.morph == []
        assert profile.synt.counts == {}

    def test_streaming_builder_matches_indexed_builder(self):
        corpus = verb_corpus(past=10, pres=5) + verb_corpus(past=0, pres=2, deprel="xcomp")
        for i, sent in enumerate(corpus):
            corpus[i] = [
                type(t)(t.form, t.lemma, t.upos, t.feats, t.deprel, i, t.token_index)
                for t in sent
            ]
        lexicon = TargetLexicon([TargetEntry("work")])
        index = index_usages(corpus, lexicon, Period.T1)
        via_index = build_profile(corpus, index, "work", Period.T1)
        via_stream = build_profiles(iter(corpus), lexicon, Period.T1)["work"]
        assert profile_to_json_dict(via_index) == profile_to_json_dict(via_stream)


class TestCategoryDistance:
    def test_identical_vectors_distance_exactly_zero(self):
        a = CategoryVector("Tense", {"Past": 42, "Pres": 51})
        b = CategoryVector("Tense", {"Past": 42, "Pres": 51})
        assert category_distance(a, b) == 0.0

    def test_orthogonal_vectors_distance_exactly_one(self):
        a = CategoryVector("Tense", {"Past": 1})
        b = CategoryVector("Tense", {"Pres": 1})
        assert category_distance(a, b) == 1.0

    def test_near_identical_percentage_vectors(self):
        a = CategoryVector("Number", {"Sing": 43.73, "Plur": 56.27})
        b = CategoryVector("Number", {"Sing": 43.67, "Plur": 56.33})
        distance = category_distance(a, b)
        assert distance is not None and distance < 1e-5

    def test_all_zero_vector_gives_absent_outcome(self):
        a = CategoryVector("Tense", {"Past": 0})
        b = CategoryVector("Tense", {"Past": 3})
        assert category_distance(a, b) is None

    def test_negative_counts_rejected(self):
        with pytest.raises(ValueError):
            CategoryVector("Tense", {"Past": -1})


class TestScoreProfiles:
    def p_pair(self, morph1, morph2, synt1=None, synt2=None):
        synt1 = synt1 or {"root": 10}
        synt2 = synt2 or {"root": 10}
        p1 = make_profile("w", Period.T1, morph1, synt1, sum(synt1.values()))
        p2 = make_profile("w", Period.T2, morph2, synt2, sum(synt2.values()))
        return p1, p2

    def test_identical_profiles_zero_for_all_kinds(self):
        morph = {"Tense": {"Past": 4, "Pres": 6}}
        p1, p2 = self.p_pair(morph, morph)
        for kind in ProfileKind:
            assert score_profiles(p1, p2, kind) == 0.0

    def test_tense_flip_with_stable_syntax(self):
        p1, p2 = self.p_pair({"Tense": {"Past": 10}}, {"Tense": {"Pres": 10}})
        assert score_profiles(p1, p2, ProfileKind.MORPH) == 1.0
        assert score_profiles(p1, p2, ProfileKind.SYNT) == 0.0
        assert score_profiles(p1, p2, ProfileKind.MORPHSYNT) == 1.0

    def test_only_shared_category_is_syntax(self):
        p1, p2 = self.p_pair(
            {"Tense": {"Past": 5}}, {"Mood": {"Ind": 5}},
            synt1={"root": 3, "xcomp": 2}, synt2={"root": 5},
        )
        synt_score = score_profiles(p1, p2, ProfileKind.SYNT)
        assert score_profiles(p1, p2, ProfileKind.MORPH) is None
        assert score_profiles(p1, p2, ProfileKind.MORPHSYNT) == synt_score

    def test_zero_usage_period_gives_missing_scores(self):
        p1 = make_profile("w", Period.T1, {"Tense": {"Past": 5}}, {"root": 5}, 5)
        p2 = make_profile("w", Period.T2, {}, {}, 0)
        for kind in ProfileKind:
            assert score_profiles(p1, p2, kind) is None

    def test_different_lemmas_rejected(self):
        p1 = make_profile("a", Period.T1, {}, {"root": 1}, 1)
        p2 = make_profile("b", Period.T2, {}, {"root": 1}, 1)
        with pytest.raises(ValueError):
            score_profiles(p1, p2, ProfileKind.SYNT)

    def test_min_count_drops_rare_categories(self):
        p1, p2 = self.p_pair(
            {"Tense": {"Past": 100}, "Rare": {"A": 1}},
            {"Tense": {"Past": 100}, "Rare": {"B": 1}},
            synt1={"root": 101}, synt2={"root": 101},
        )
        assert score_profiles(p1, p2, ProfileKind.MORPH) == 1.0
        assert score_profiles(p1, p2, ProfileKind.MORPH, min_count=3) == 0.0


counts = st.dictionaries(
    st.sampled_from(["Past", "Pres", "Fut", "Imp"]),
    st.integers(min_value=0, max_value=200),
    min_size=1,
    max_size=4,
)


class TestProperties:
    @given(counts, counts, st.integers(min_value=1, max_value=50))
    def test_scale_invariance(self, c1, c2, k):
        a = CategoryVector("Tense", c1)
        b = CategoryVector("Tense", c2)
        scaled = CategoryVector("Tense", {key: k * val for key, val in c1.items()})
        assert category_distance(a, b) == pytest.approx(
            category_distance(scaled, b), abs=1e-12, nan_ok=True
        ) or (category_distance(a, b) is None and category_distance(scaled, b) is None)

    @given(counts, counts)
    def test_symmetry_and_range(self, c1, c2):
        a = CategoryVector("Tense", c1)
        b = CategoryVector("Tense", c2)
        d_ab = category_distance(a, b)
        d_ba = category_distance(b, a)
        assert d_ab == d_ba
        if d_ab is not None:
            assert 0.0 <= d_ab <= 1.0

    def test_score_symmetry_all_kinds(self):
        p1 = make_profile(
            "w", Period.T1,
            {"Tense": {"Past": 7, "Pres": 2}, "Mood": {"Ind": 4}},
            {"root": 6, "xcomp": 3}, 9,
        )
        p2 = make_profile(
            "w", Period.T2,
            {"Tense": {"Past": 1, "Pres": 8}, "Mood": {"Ind": 2, "Sub": 3}},
            {"root": 2, "advcl": 7}, 9,
        )
        for kind in ProfileKind:
            assert score_profiles(p1, p2, kind) == score_profiles(p2, p1, kind)

    def test_morphsynt_dominates_shared_components(self):
        p1 = make_profile(
            "w", Period.T1,
            {"Tense": {"Past": 9, "Pres": 1}}, {"root": 8, "xcomp": 2}, 10,
        )
        p2 = make_profile(
            "w", Period.T2,
            {"Tense": {"Past": 2, "Pres": 8}}, {"root": 3, "xcomp": 7}, 10,
        )
        morph = score_profiles(p1, p2, ProfileKind.MORPH)
        synt = score_profiles(p1, p2, ProfileKind.SYNT)
        morphsynt = score_profiles(p1, p2, ProfileKind.MORPHSYNT)
        assert morphsynt == max(morph, synt)


class TestJson:
    def test_roundtrip(self):
        profile = make_profile(
            "tree", Period.T2,
            {"Number": {"Sing": 4373, "Plur": 5627}}, {"nsubj": 5000, "obj": 5000},
            10000,
        )
        again = profile_from_json_dict(profile_to_json_dict(profile))
        assert profile_to_json_dict(again) == profile_to_json_dict(profile)

    def test_dump_writes_per_lemma_period_file(self, tmp_path):
        profile = make_profile("tree", Period.T1, {}, {"root": 1}, 1)
        path = dump_profile(profile, tmp_path)
        assert path.name == "tree.t1.json"
        assert path.exists()
