"""Title-driven slide drafting from parsed scientific papers."""

from .docmodel import (
    DeckStats,
    FigureAsset,
    PaperDoc,
    Section,
    SlideRecord,
    deck_stats,
    ingest_deck,
    ingest_paper,
    serialize_deck,
    serialize_paper,
)
from .embedding import (
    HashedTfidfEmbedder,
    RemoteEmbeddingClient,
    TrainConfig,
    TrainingPair,
    build_training_pairs,
    load_embedder,
    remote_embed,
    save_embedder,
    train_contrastive,
)
from .figures import RankedFigure, evaluate_figures, rank_figures
from .generation import (
    GenerationQuery,
    RemoteGeneratorClient,
    SlideDraft,
    SlideOptions,
    build_slide,
    compose_query,
    generate_extractive,
    generate_remote,
    parse_query,
)
from .headertree import (
    HeaderNode,
    HeaderTree,
    KeywordSet,
    build_tree,
    descendants,
    match_title,
    snippet_keyword,
    tree_to_dict,
)
from .retrieval import (
    ScoredCandidate,
    Snippet,
    SnippetIndex,
    build_index,
    context_text,
    load_index,
    retrieve,
    save_index,
    snippetize,
)
from .textkit import (
    IdfTable,
    RougeReport,
    RougeScore,
    idf_recall,
    idf_table,
    levenshtein_ratio,
    ngrams,
    novel_ngram_ratio,
    precision_at_k,
    rouge,
    split_sentences,
    tokenize,
)

__version__ = "0.1.0"
