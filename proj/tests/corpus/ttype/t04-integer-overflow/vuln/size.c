static long alloc_size(int count, int esize)
{
    long total;
    total = count * esize;
    return total;
}
