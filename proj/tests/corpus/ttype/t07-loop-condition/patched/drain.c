static int drain_buffer(int total)
{
    int left = total;
    int chunk;
    while (left > 0) {
        chunk = next_chunk();
        if (chunk <= 0) {
            return -1;
        }
        left = left - chunk;
    }
    return 0;
}
