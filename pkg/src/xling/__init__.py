"""Cross-lingual document similarity, retrieval and alignment.

The package splits into ingestion (:mod:`xling.corpus`, :mod:`xling.wikitext`),
text preparation (:mod:`xling.textprep`), the sparse vector-space layer
(:mod:`xling.vsm`), bilingual-dictionary measures (:mod:`xling.bidict`),
latent semantic indexing (:mod:`xling.lsi`), retrieval/alignment/evaluation
(:mod:`xling.retrieval`) and synthetic ground-truth corpora
(:mod:`xling.synthetic`). The ``xling`` console script wires them together.
"""

from .bidict import (
    BilingualDictionary,
    MatchReport,
    bin_measure,
    bin_pooled,
    bin_symmetric,
    dict_cosine,
    load_dictionary,
    match_report,
    matching_rate,
    oov_rate,
    trans,
)
from .corpus import (
    AlignedCorpus,
    Document,
    load_aligned_corpus,
    load_documents,
    save_aligned_corpus,
    save_documents,
    split_corpus,
)
from .lsi import (
    CrossVocabulary,
    LsiModel,
    build_cross_matrix,
    build_mono_matrix,
    embed_crosslingual,
    load_model,
    project,
    save_model,
    train,
)
from .retrieval import (
    AlignmentPair,
    DictionaryProvider,
    EvalReport,
    FileCacheProvider,
    IdentityProvider,
    RankedList,
    TranslationProvider,
    align_corpora,
    alignment_report,
    evaluate_retrieval,
    gold_mapping,
    oracle_experiment,
    recall_at_k,
    retrieve,
    retrieve_ar_lsi,
    retrieve_cl_lsi,
)
from .textprep import (
    PipelineConfig,
    ReducerKind,
    Token,
    apply_filters,
    light_stem,
    lemmatize,
    make_reducer,
    morphar_lookup,
    reduce,
    root_stem,
    run_pipeline,
    suffix_stem,
    tokenize,
)
from .vsm import (
    DocVector,
    TermDocMatrix,
    Vocabulary,
    build_vocabulary,
    cosine,
    tfidf_weight,
    vectorize,
)
from .wikitext import (
    WikiArticle,
    extract_comparable_articles,
    parse_interlanguage_links,
    strip_wiki_markup,
)

__version__ = "0.1.0"
