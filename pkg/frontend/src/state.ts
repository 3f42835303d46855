/**
 * Pure projections of service responses into view state.
 *
 * Nothing here touches the DOM or the network, so a page reload that
 * replays the same responses reconstructs identical state, and the
 * dashboard never shows more than the service reported.
 */

import type { ProgressResponse, QueueResponse, RepoSummary } from './types.js';

export interface QueueView {
  judge: string;
  current: RepoSummary | null;
  remaining: number;
}

export function projectQueue(
  judge: string,
  queue: QueueResponse,
  detail: RepoSummary | null,
): QueueView {
  return {
    judge,
    current: queue.current ? detail : null,
    remaining: queue.remaining,
  };
}

export interface FilePage {
  slice: string[];
  page: number;
  pageCount: number;
  total: number;
  rangeLabel: string;
}

export const FILE_PAGE_SIZE = 50;

/** Stable paging over large file lists; the shown total is always exact. */
export function pageFiles(paths: string[], page: number, pageSize = FILE_PAGE_SIZE): FilePage {
  const total = paths.length;
  const pageCount = Math.max(1, Math.ceil(total / pageSize));
  const clamped = Math.min(Math.max(page, 0), pageCount - 1);
  const start = clamped * pageSize;
  const slice = paths.slice(start, start + pageSize);
  const rangeLabel =
    total === 0 ? 'no files' : `${start + 1}-${start + slice.length} of ${total}`;
  return { slice, page: clamped, pageCount, total, rangeLabel };
}

export interface DashboardView {
  total: number;
  pending: number;
  keptMalware: number;
  keptBenign: number;
  excluded: number;
  /** fraction of quorum-decided repositories that reached unanimity */
  agreementRate: number | null;
  ownDone: number;
  ownRemaining: number;
}

/**
 * Aggregate view only: per-judge ballot contents are never exposed by the
 * service and the dashboard shows nothing beyond the caller's own counts.
 */
export function projectDashboard(progress: ProgressResponse, judge: string): DashboardView {
  const own = progress.judges[judge] ?? { done: 0, remaining: 0 };
  return {
    total: progress.total,
    pending: progress.consensus.pending,
    keptMalware: progress.consensus.kept_malware,
    keptBenign: progress.consensus.kept_benign,
    excluded: progress.consensus.excluded,
    agreementRate: progress.agreement_rate,
    ownDone: own.done,
    ownRemaining: own.remaining,
  };
}
