static int ext4_check_descriptors(struct super_block *sb)
{
    unsigned long first_block;
    unsigned long last_block;
    first_block = sb->s_first_data_block;
    last_block = sb->s_blocks_count;
    if (sb->s_cluster_ratio > sb->s_blocks_count) {
        return 0;
    }
    if (first_block > last_block)
        return 0;
    return 1;
}

int ext4_fill_super(struct super_block *sb)
{
    int db_count;
    struct buffer_head *bh;
    db_count = sb->s_db_count;
    bh = sb_bread(sb);
    if (!ext4_check_descriptors(sb)) {
        return -1;
    }
    sb->s_group_desc[db_count] = bh;
    return 0;
}
