/** Wire types for the labeling service HTTP+JSON API. */

export type JudgeLabel = 'malware' | 'benign' | 'uncertain';

export type ConsensusStatus = 'pending' | 'kept_malware' | 'kept_benign' | 'excluded';

export interface QueueItem {
  full_name: string;
  title: string;
  description: string;
}

export interface QueueResponse {
  judge: string;
  current: QueueItem | null;
  remaining: number;
}

/** The ten repository fields as served by GET /api/repo/{name}. */
export interface RepoSummary {
  full_name: string;
  title: string;
  description: string;
  topics: string[];
  readme: string;
  file_paths: string[];
  created_at: string;
  modified_at: string;
  fork_count: number;
  watcher_count: number;
  star_count: number;
  author_followers: number;
  author_following: number;
}

export interface BallotRequest {
  repo_name: string;
  judge_id: string;
  label: JudgeLabel;
}

export interface BallotResponse {
  repo_name: string;
  status: ConsensusStatus;
}

export interface JudgeProgress {
  done: number;
  remaining: number;
}

export interface ProgressResponse {
  total: number;
  consensus: Record<ConsensusStatus, number>;
  agreement_rate: number | null;
  judges: Record<string, JudgeProgress>;
}

export interface ApiErrorBody {
  error: string;
  detail?: string;
}
