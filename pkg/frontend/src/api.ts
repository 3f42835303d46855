/** Thin typed client over the labeling service endpoints. */

import type {
  BallotRequest,
  BallotResponse,
  ConsensusStatus,
  ProgressResponse,
  QueueResponse,
  RepoSummary,
} from './types.js';

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly kind: string,
    detail?: string,
  ) {
    super(`${kind}${detail ? `: ${detail}` : ''} (HTTP ${status})`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class LabelApi {
  constructor(
    private readonly base: string = '',
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchImpl(`${this.base}${path}`, init);
    if (!response.ok) {
      let kind = 'RequestFailed';
      let detail: string | undefined;
      try {
        const body = (await response.json()) as { error?: string; detail?: string };
        kind = body.error ?? kind;
        detail = body.detail;
      } catch {
        /* non-JSON error body */
      }
      throw new ApiError(response.status, kind, detail);
    }
    return (await response.json()) as T;
  }

  queue(judge: string): Promise<QueueResponse> {
    return this.request<QueueResponse>(`/api/queue/${encodeURIComponent(judge)}`);
  }

  repo(fullName: string): Promise<RepoSummary> {
    // full names contain a slash; the service routes on the raw path
    return this.request<RepoSummary>(`/api/repo/${fullName}`);
  }

  submitBallot(ballot: BallotRequest): Promise<BallotResponse> {
    return this.request<BallotResponse>('/api/ballot', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(ballot),
    });
  }

  consensus(): Promise<Record<string, ConsensusStatus>> {
    return this.request<Record<string, ConsensusStatus>>('/api/consensus');
  }

  progress(): Promise<ProgressResponse> {
    return this.request<ProgressResponse>('/api/progress');
  }

  /** Raw JSONL ground-truth export (also persisted server-side). */
  async exportGroundtruth(): Promise<string> {
    const response = await this.fetchImpl(`${this.base}/api/export`);
    if (!response.ok) {
      throw new ApiError(response.status, 'ExportFailed');
    }
    return response.text();
  }
}
