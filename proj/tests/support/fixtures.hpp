#pragma once

// Small, fast model settings over a generated corpus, shared by the pipeline-level tests.

#include "topiclens/corpus.hpp"
#include "topiclens/eval/synthetic.hpp"
#include "topiclens/pipeline.hpp"

namespace testing {

inline topiclens::SyntheticCorpusSpec tiny_spec(std::uint64_t seed = 1) {
  topiclens::SyntheticCorpusSpec s;
  s.topics = 3;
  s.docs_per_topic = 10;
  s.vocab_size = 120;
  s.doc_length_min = 40;
  s.doc_length_max = 80;
  s.queries_per_topic = 2;
  s.seed = seed;
  return s;
}

inline topiclens::ModelConfig tiny_model() {
  topiclens::ModelConfig m;
  m.pipeline.chunk_size = 30;
  m.pipeline.overlap = 5;
  m.pipeline.stopword_list = "none";
  m.sparse.min_df = 2;
  m.sparse.max_df_ratio = 0.9;
  m.lsa.rank = 8;
  m.lsa.seed = 5;
  m.lda.topics = 3;
  m.lda.iterations = 60;
  m.lda.burn_in = 20;
  m.lda.sample_lag = 5;
  m.lda.seed = 6;
  m.fold_in_iterations = 30;
  m.fold_in_seed = 7;
  return m;
}

inline std::vector<topiclens::Chunk> tiny_chunks(const topiclens::SyntheticCorpus& corpus,
                                                 const topiclens::ModelConfig& model) {
  return topiclens::ingest_documents(corpus.documents, model.pipeline).chunks;
}

}  // namespace testing
